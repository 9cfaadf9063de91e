//! Pipeline orchestration: raw corpus -> +primary -> +heuristic, the
//! random control partition, and the report bundle.
//!
//! Every run writes its corpus snapshots, dedup verdicts, metric table,
//! threshold report, and a manifest into the output directory. Identical
//! configs and seeds produce byte-identical outputs regardless of worker
//! count.

mod config;
mod manifest;
pub mod report;
mod svg;

pub use config::{ConfigError, PipelineConfig, SideSpec};
pub use manifest::{
    Manifest, ManifestError, ThresholdRecord, STAGE_EXACT, STAGE_HEURISTIC, STAGE_MINHASH,
    STAGE_ORDER, STAGE_SCRIPT,
};

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{self, CorpusError, CorpusStats, Document, StageDelta};
use crate::dedup::{exact_dedup, minhash_dedup, DedupError, DedupVerdict};
use crate::heuristics::{
    compute_metrics, family_scores, write_metrics_csv, FamilyScores, MetricRow, MetricsError,
    FAMILIES, METRIC_NAMES,
};
use crate::markup::strip_markup;
use crate::script::{filter_document, ScriptError, ScriptRegistry};
use crate::threshold::{
    prune_by, select_threshold, Threshold, ThresholdError, ValueCut,
};
use crate::analysis::AnalysisError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<PipelineError>,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Dedup(#[from] DedupError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("duplicate document id: {id}")]
    DuplicateId { id: String },
    #[error("control size {n_remove} exceeds corpus size {size}")]
    ControlTooLarge { n_remove: usize, size: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    fn in_stage(stage: &'static str) -> impl FnOnce(Self) -> Self {
        move |source| PipelineError::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True for degenerate-distribution failures (dedicated exit code).
    pub fn is_degenerate(&self) -> bool {
        match self {
            PipelineError::Threshold(ThresholdError::Degenerate) => true,
            PipelineError::Stage { source, .. } => source.is_degenerate(),
            _ => false,
        }
    }

    /// Process exit code: 1 usage/config, 2 data, 3 degenerate distribution.
    pub fn exit_code(&self) -> i32 {
        if self.is_degenerate() {
            3
        } else if matches!(self, PipelineError::Config(_)) {
            1
        } else {
            2
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug)]
pub struct PrimaryOutcome {
    /// The +primary corpus, in input order.
    pub corpus: Vec<Document>,
    pub manifest: Manifest,
    /// The unfiltered input, kept for the random control partition.
    pub raw: Vec<Document>,
    pub exact_verdicts: Vec<DedupVerdict>,
    pub minhash_verdicts: Vec<DedupVerdict>,
}

#[derive(Debug)]
pub struct HeuristicOutcome {
    /// The +heuristic corpus, in input order.
    pub corpus: Vec<Document>,
    pub removed: Vec<Document>,
    pub thresholds: Vec<Threshold>,
    pub metric_rows: Vec<MetricRow>,
    pub scores: Vec<FamilyScores>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub primary_docs: u64,
    pub heuristic_docs: u64,
    pub control_docs: u64,
}

/// Reads the configured input, forcing the configured language code and
/// optionally stripping wiki markup. Ids must be unique.
pub fn load_corpus(config: &PipelineConfig) -> Result<Vec<Document>, PipelineError> {
    let mut docs: Vec<Document> =
        corpus::collect_corpus(&config.input, config.format).map_err(PipelineError::from)?;
    if let Some(lang) = &config.lang {
        for doc in &mut docs {
            doc.lang = lang.clone();
        }
    }
    if config.strip_markup {
        docs.par_iter_mut().for_each(|doc| {
            doc.text = strip_markup(&doc.text);
        });
    }
    let mut seen = HashSet::with_capacity(docs.len());
    for doc in &docs {
        if !seen.insert(doc.id.as_str()) {
            return Err(PipelineError::DuplicateId { id: doc.id.clone() });
        }
    }
    Ok(docs)
}

fn load_registry(config: &PipelineConfig) -> Result<ScriptRegistry, PipelineError> {
    let mut registry = ScriptRegistry::default_registry();
    if let Some(path) = &config.registry {
        registry.merge(ScriptRegistry::load(path)?);
    }
    Ok(registry)
}

/// Applies the primary filters in order: script filter, exact dedup,
/// MinHash dedup. Writes `primary.jsonl`, both verdict files, and the
/// manifest into the output directory.
pub fn run_primary(config: &PipelineConfig) -> Result<PrimaryOutcome, PipelineError> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| PipelineError::io(&config.out_dir, e))?;
    let raw = load_corpus(config)?;
    let mut manifest = Manifest::new(config);

    let result = run_primary_stages(config, &raw, &mut manifest);
    match result {
        Ok((corpus, exact_verdicts, minhash_verdicts)) => {
            manifest.completed = true;
            manifest.save(&config.out_dir.join("manifest.json"))?;
            Ok(PrimaryOutcome {
                corpus,
                manifest,
                raw,
                exact_verdicts,
                minhash_verdicts,
            })
        }
        Err(e) => {
            // Flag the partial run before surfacing the failure.
            manifest.completed = false;
            manifest.failed_stage = Some(stage_of(&e).to_string());
            let _ = manifest.save(&config.out_dir.join("manifest.json"));
            Err(e)
        }
    }
}

fn stage_of(e: &PipelineError) -> &'static str {
    match e {
        PipelineError::Stage { stage, .. } => stage,
        _ => "io",
    }
}

type PrimaryStages = (Vec<Document>, Vec<DedupVerdict>, Vec<DedupVerdict>);

fn run_primary_stages(
    config: &PipelineConfig,
    raw: &[Document],
    manifest: &mut Manifest,
) -> Result<PrimaryStages, PipelineError> {
    let registry = load_registry(config).map_err(PipelineError::in_stage(STAGE_SCRIPT))?;
    let before = CorpusStats::from_docs(raw);

    // Script filter; documents reduced to nothing drop at the boundary.
    let outcomes = raw
        .par_iter()
        .map(|doc| filter_document(doc.clone(), &registry))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PipelineError::in_stage(STAGE_SCRIPT)(e.into()))?;
    let script_kept: Vec<Document> = outcomes
        .into_iter()
        .filter(|o| !o.dropped)
        .map(|o| o.document)
        .collect();
    let after_script = CorpusStats::from_docs(&script_kept);
    manifest.push_stage(StageDelta::new(STAGE_SCRIPT, before, after_script));

    let (exact_kept, exact_verdicts) = exact_dedup(script_kept);
    let after_exact = CorpusStats::from_docs(&exact_kept);
    manifest.push_stage(StageDelta::new(STAGE_EXACT, after_script, after_exact));

    let (minhash_kept, minhash_verdicts) = minhash_dedup(exact_kept, &config.dedup)
        .map_err(|e| PipelineError::in_stage(STAGE_MINHASH)(e.into()))?;
    let after_minhash = CorpusStats::from_docs(&minhash_kept);
    manifest.push_stage(StageDelta::new(STAGE_MINHASH, after_exact, after_minhash));

    corpus::write_corpus(minhash_kept.iter().cloned(), &config.out_dir.join("primary.jsonl"))
        .map_err(|e| PipelineError::in_stage(STAGE_MINHASH)(e.into()))?;
    write_verdicts(&config.out_dir.join("verdicts_exact.jsonl"), &exact_verdicts)?;
    write_verdicts(&config.out_dir.join("verdicts_minhash.jsonl"), &minhash_verdicts)?;
    Ok((minhash_kept, exact_verdicts, minhash_verdicts))
}

fn write_verdicts(path: &Path, verdicts: &[DedupVerdict]) -> Result<(), PipelineError> {
    let file = File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for verdict in verdicts {
        let line = serde_json::to_string(verdict).expect("verdicts serialize");
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| PipelineError::io(path, e))?;
    }
    out.flush().map_err(|e| PipelineError::io(path, e))
}

/// Scores the +primary corpus, selects thresholds, prunes, and writes
/// `metrics.csv`, `thresholds.json`, and `heuristic.jsonl`. Appends the
/// prune stage and threshold records to the manifest and re-saves it.
pub fn run_heuristic(
    config: &PipelineConfig,
    docs: Vec<Document>,
    manifest: &mut Manifest,
) -> Result<HeuristicOutcome, PipelineError> {
    let wrap = |e: PipelineError| PipelineError::in_stage(STAGE_HEURISTIC)(e);
    if manifest.stage(STAGE_HEURISTIC).is_some() {
        return Err(PipelineError::Manifest(ManifestError::Invalid {
            path: config.out_dir.join("manifest.json"),
            msg: "manifest already records a heuristic stage; use a fresh output directory".into(),
        }));
    }
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| PipelineError::io(&config.out_dir, e))?;

    let metric_rows: Vec<MetricRow> = docs
        .par_iter()
        .map(|doc| MetricRow {
            doc_id: doc.id.clone(),
            metrics: compute_metrics(doc, config.trigram_unit),
        })
        .collect();
    let scores = family_scores(&metric_rows);
    write_metrics_csv(&config.out_dir.join("metrics.csv"), &metric_rows, &scores)
        .map_err(|e| wrap(e.into()))?;

    let result = select_all_thresholds(config, &metric_rows, &scores, manifest);
    let thresholds = match result {
        Ok(t) => t,
        Err(e) => {
            manifest.completed = false;
            manifest.failed_stage = Some(STAGE_HEURISTIC.to_string());
            let _ = manifest.save(&config.out_dir.join("manifest.json"));
            return Err(wrap(e));
        }
    };
    write_thresholds_json(&config.out_dir.join("thresholds.json"), &thresholds)?;

    let cuts: Vec<ValueCut> = thresholds.iter().map(ValueCut::from_threshold).collect();
    let outcome = prune_corpus(config, docs, &metric_rows, &scores, &cuts).map_err(wrap)?;

    manifest.push_stage(outcome.delta.clone());
    for t in &thresholds {
        manifest
            .thresholds
            .push(ThresholdRecord::from_threshold(t));
    }
    manifest.completed = true;
    manifest.save(&config.out_dir.join("manifest.json"))?;

    corpus::write_corpus(
        outcome.kept.iter().cloned(),
        &config.out_dir.join("heuristic.jsonl"),
    )
    .map_err(|e| wrap(e.into()))?;
    Ok(HeuristicOutcome {
        corpus: outcome.kept,
        removed: outcome.removed,
        thresholds,
        metric_rows,
        scores,
    })
}

struct PrunedCorpus {
    kept: Vec<Document>,
    removed: Vec<Document>,
    delta: StageDelta,
}

fn prune_corpus(
    config: &PipelineConfig,
    docs: Vec<Document>,
    metric_rows: &[MetricRow],
    scores: &[FamilyScores],
    cuts: &[ValueCut],
) -> Result<PrunedCorpus, PipelineError> {
    let outcome = if config.per_metric {
        let by_id: std::collections::HashMap<&str, &MetricRow> = metric_rows
            .iter()
            .map(|r| (r.doc_id.as_str(), r))
            .collect();
        prune_by(docs, cuts, STAGE_HEURISTIC, |doc_id, name| {
            let idx = METRIC_NAMES.iter().position(|m| *m == name)?;
            by_id.get(doc_id).map(|r| r.metrics.values()[idx])
        })?
    } else {
        let by_id: std::collections::HashMap<&str, &FamilyScores> =
            scores.iter().map(|s| (s.doc_id.as_str(), s)).collect();
        prune_by(docs, cuts, STAGE_HEURISTIC, |doc_id, name| {
            let family: crate::heuristics::Family = name.parse().ok()?;
            by_id.get(doc_id).map(|s| s.get(family))
        })?
    };
    Ok(PrunedCorpus {
        kept: outcome.kept,
        removed: outcome.removed,
        delta: outcome.delta,
    })
}

/// Selects thresholds for every configured column/side pair, honoring
/// `skip_degenerate`.
fn select_all_thresholds(
    config: &PipelineConfig,
    metric_rows: &[MetricRow],
    scores: &[FamilyScores],
    manifest: &mut Manifest,
) -> Result<Vec<Threshold>, PipelineError> {
    if !config.thresholds_enabled {
        return Ok(Vec::new());
    }
    // (column name, values) pairs to threshold.
    let mut columns: Vec<(String, Vec<f64>, crate::heuristics::Family)> = Vec::new();
    if config.per_metric {
        for family in FAMILIES {
            if !config.sides.contains_key(&family) {
                continue;
            }
            for &idx in family.metric_indices() {
                let values: Vec<f64> =
                    metric_rows.iter().map(|r| r.metrics.values()[idx]).collect();
                columns.push((METRIC_NAMES[idx].to_string(), values, family));
            }
        }
    } else {
        for family in FAMILIES {
            if !config.sides.contains_key(&family) {
                continue;
            }
            let values: Vec<f64> = scores.iter().map(|s| s.get(family)).collect();
            columns.push((family.name().to_string(), values, family));
        }
    }

    let mut thresholds = Vec::new();
    for (name, values, family) in &columns {
        for &side in config.sides[family].sides() {
            match select_threshold(name, values, side, config.threshold_frac, config.threshold_seed)
            {
                Ok(t) => thresholds.push(t),
                Err(ThresholdError::Degenerate) if config.skip_degenerate => {
                    manifest.skipped_families.push(name.clone());
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(thresholds)
}

fn write_thresholds_json(path: &Path, thresholds: &[Threshold]) -> Result<(), PipelineError> {
    let json = serde_json::to_string_pretty(thresholds).expect("thresholds serialize");
    std::fs::write(path, json).map_err(|e| PipelineError::io(path, e))
}

/// Removes `n_remove` uniformly random documents (seeded): a control
/// partition matched on document count against the filtered corpus.
pub fn run_random_control(
    docs: &[Document],
    n_remove: usize,
    seed: u64,
) -> Result<Vec<Document>, PipelineError> {
    if n_remove > docs.len() {
        return Err(PipelineError::ControlTooLarge {
            n_remove,
            size: docs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let removed: HashSet<usize> = rand::seq::index::sample(&mut rng, docs.len(), n_remove)
        .into_iter()
        .collect();
    Ok(docs
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, d)| d.clone())
        .collect())
}

/// The full pipeline: primary filters, heuristic pruning, the random
/// control partition, and a single-wiki report bundle under
/// `<out_dir>/report/`.
pub fn run_all(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let primary = run_primary(config)?;
    let mut manifest = primary.manifest;
    let heuristic = run_heuristic(config, primary.corpus, &mut manifest)?;

    let n_remove = manifest.primary_removed_docs() as usize;
    let control = run_random_control(&primary.raw, n_remove, config.control_seed)?;
    corpus::write_corpus(control.iter().cloned(), &config.out_dir.join("control.jsonl"))?;

    let wiki = config.lang.clone().unwrap_or_else(|| "corpus".to_string());
    let report_dir = config.out_dir.join("report");
    report::report(
        &report_dir,
        &[(wiki.clone(), manifest.clone())],
        &[(wiki, config.out_dir.join("metrics.csv"))],
        None,
        None,
        &report::ReportOptions::default(),
    )?;

    Ok(RunSummary {
        primary_docs: manifest.stage(STAGE_MINHASH).map_or(0, |s| s.docs_after),
        heuristic_docs: heuristic.corpus.len() as u64,
        control_docs: control.len() as u64,
        manifest,
    })
}
