//! Corpus quality filtering for multilingual wiki dumps.
//!
//! The crate implements a two-stage cleaning pipeline plus corpus-level
//! quality analytics:
//!
//! - **Primary filtering** (`script`, `dedup`): strip characters outside a
//!   language's documented script(s), then remove exact and MinHash/LSH
//!   near-duplicate articles.
//! - **Heuristic filtering** (`heuristics`, `threshold`): score each document
//!   on seven surface metrics grouped into absolute/relative/entropy
//!   families, then prune below automatically selected, distribution-driven
//!   thresholds (kernel density comparison of a tail sample against a random
//!   sample).
//! - **Analytics** (`analysis`): weighted k-means quality tiers over
//!   retention fractions, the Depth+ collaboration proxy, and Spearman
//!   correlation studies.
//!
//! `pipeline` ties the stages together behind a config file and writes a
//! manifest recording every parameter, seed, and per-stage retention delta,
//! so runs are reproducible and comparable.

pub mod analysis;
pub mod corpus;
pub mod dedup;
pub mod heuristics;
pub mod markup;
pub mod pipeline;
pub mod script;
pub mod threshold;
pub mod wikixml;

pub use corpus::{CorpusStats, Document, StageDelta};
pub use dedup::{DedupParams, DedupReason, DedupVerdict};
pub use heuristics::{Family, FamilyScores, MetricVector};
pub use pipeline::{Manifest, PipelineConfig};
pub use script::ScriptRegistry;
pub use threshold::{Side, Threshold};
