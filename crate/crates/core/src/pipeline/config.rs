//! Pipeline configuration: a plain-text key-value file with section
//! headers, every key overridable from the command line.
//!
//! ```text
//! [input]
//! path = yo.jsonl
//! format = jsonl        # or wiki-xml
//! lang = yo
//!
//! [dedup]
//! threshold = 0.85
//! seed = 7
//!
//! [threshold]
//! frac = 0.05
//! side.entropy = both
//!
//! [output]
//! dir = out/
//! ```
//!
//! Seeds are explicit integers with fixed defaults; nothing is derived from
//! the clock, so identical configs give identical runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusFormat;
use crate::dedup::DedupParams;
use crate::heuristics::{Family, TrigramUnit, FAMILIES};
use crate::threshold::Side;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config line {line}: unknown key: {key}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("missing required setting: {key}")]
    Missing { key: &'static str },
    #[error("{key} path does not exist: {path}")]
    MissingPath { key: &'static str, path: PathBuf },
}

/// Which tails to prune for one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Low,
    High,
    Both,
}

impl SideSpec {
    pub fn sides(self) -> &'static [Side] {
        match self {
            SideSpec::Low => &[Side::Low],
            SideSpec::High => &[Side::High],
            SideSpec::Both => &[Side::Low, Side::High],
        }
    }
}

impl std::str::FromStr for SideSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(SideSpec::Low),
            "high" => Ok(SideSpec::High),
            "both" => Ok(SideSpec::Both),
            other => Err(format!("expected low, high, or both; got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: CorpusFormat,
    /// Forces every document's language code when set; required for inputs
    /// that do not carry one (e.g. dumps without xml:lang).
    pub lang: Option<String>,
    /// Custom script registry file, layered over the built-in table.
    pub registry: Option<PathBuf>,
    pub strip_markup: bool,
    pub dedup: DedupParams,
    pub trigram_unit: TrigramUnit,
    /// Threshold each raw metric instead of the family scores.
    pub per_metric: bool,
    /// Apply heuristic thresholds at all; when false the heuristic stage
    /// passes everything through.
    pub thresholds_enabled: bool,
    pub threshold_frac: f64,
    pub threshold_seed: u64,
    /// Pruned tail(s) per family; families absent here are not thresholded.
    pub sides: BTreeMap<Family, SideSpec>,
    /// Downgrade degenerate-distribution errors to a skipped family.
    pub skip_degenerate: bool,
    pub control_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses the machine core count.
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            format: CorpusFormat::Jsonl,
            lang: None,
            registry: None,
            strip_markup: false,
            dedup: DedupParams::default(),
            trigram_unit: TrigramUnit::Words,
            per_metric: false,
            thresholds_enabled: true,
            threshold_frac: 0.05,
            threshold_seed: 0,
            sides: FAMILIES.iter().map(|&f| (f, SideSpec::Low)).collect(),
            skip_degenerate: false,
            control_seed: 0,
            out_dir: PathBuf::new(),
            workers: 0,
        }
    }
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = PipelineConfig::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                    line,
                    msg: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                msg: "expected `key = value`".into(),
            })?;
            config.set(&section, key.trim(), value.trim(), line)?;
        }
        Ok(config)
    }

    fn set(&mut self, section: &str, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        let bad = |msg: String| ConfigError::BadValue {
            line,
            key: full.clone(),
            msg,
        };
        macro_rules! parse {
            ($ty:ty) => {
                value.parse::<$ty>().map_err(|e| bad(e.to_string()))?
            };
        }
        match full.as_str() {
            "input.path" => self.input = PathBuf::from(value),
            "input.format" => self.format = parse!(CorpusFormat),
            "input.lang" => self.lang = Some(value.to_string()),
            "input.registry" => self.registry = Some(PathBuf::from(value)),
            "input.strip_markup" => self.strip_markup = parse!(bool),
            "dedup.threshold" => self.dedup.threshold = parse!(f64),
            "dedup.permutations" => self.dedup.permutations = parse!(usize),
            "dedup.bands" => self.dedup.bands = parse!(usize),
            "dedup.rows" => self.dedup.rows = parse!(usize),
            "dedup.shingle_words" => self.dedup.shingle_words = parse!(usize),
            "dedup.seed" => self.dedup.seed = parse!(u64),
            "dedup.exact_verify" => self.dedup.exact_verify = parse!(bool),
            "heuristics.trigram_unit" => self.trigram_unit = parse!(TrigramUnit),
            "heuristics.per_metric" => self.per_metric = parse!(bool),
            "threshold.enabled" => self.thresholds_enabled = parse!(bool),
            "threshold.frac" => self.threshold_frac = parse!(f64),
            "threshold.seed" => self.threshold_seed = parse!(u64),
            "threshold.skip_degenerate" => self.skip_degenerate = parse!(bool),
            "threshold.side.absolute" => {
                self.sides.insert(Family::Absolute, parse!(SideSpec));
            }
            "threshold.side.relative" => {
                self.sides.insert(Family::Relative, parse!(SideSpec));
            }
            "threshold.side.entropy" => {
                self.sides.insert(Family::Entropy, parse!(SideSpec));
            }
            "control.seed" => self.control_seed = parse!(u64),
            "output.dir" => self.out_dir = PathBuf::from(value),
            "run.workers" => self.workers = parse!(usize),
            _ => return Err(ConfigError::UnknownKey { line, key: full }),
        }
        Ok(())
    }

    /// Checks required settings and referenced paths.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.input.as_os_str().is_empty() {
            return Err(ConfigError::Missing { key: "input.path" });
        }
        if !self.input.exists() {
            return Err(ConfigError::MissingPath {
                key: "input.path",
                path: self.input.clone(),
            });
        }
        if let Some(registry) = &self.registry {
            if !registry.exists() {
                return Err(ConfigError::MissingPath {
                    key: "input.registry",
                    path: registry.clone(),
                });
            }
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(ConfigError::Missing { key: "output.dir" });
        }
        self.dedup.validate().map_err(|e| ConfigError::BadValue {
            line: 0,
            key: "dedup".into(),
            msg: e.to_string(),
        })?;
        if !(self.threshold_frac > 0.0 && self.threshold_frac <= 1.0) {
            return Err(ConfigError::BadValue {
                line: 0,
                key: "threshold.frac".into(),
                msg: format!("{} outside (0, 1]", self.threshold_frac),
            });
        }
        Ok(())
    }
}
