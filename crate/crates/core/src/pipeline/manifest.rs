//! The run manifest: configuration snapshot, seeds, per-stage retention
//! deltas, and threshold records. Written as `manifest.json` next to the
//! filtered corpora; everything needed to compare or reproduce a run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::StageDelta;
use crate::dedup::DedupParams;
use crate::threshold::{Side, Threshold};

use super::PipelineConfig;

pub const STAGE_SCRIPT: &str = "script_filter";
pub const STAGE_EXACT: &str = "exact_dedup";
pub const STAGE_MINHASH: &str = "minhash_dedup";
pub const STAGE_HEURISTIC: &str = "heuristic_prune";

/// Canonical execution order; manifests must list stages in this order.
pub const STAGE_ORDER: [&str; 4] = [STAGE_SCRIPT, STAGE_EXACT, STAGE_MINHASH, STAGE_HEURISTIC];

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Invalid { path: PathBuf, msg: String },
}

/// Summary of one selected threshold (full curves live in thresholds.json).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub name: String,
    pub side: Side,
    pub cut: f64,
    pub n_sample: usize,
    pub seed: u64,
}

impl ThresholdRecord {
    pub fn from_threshold(t: &Threshold) -> Self {
        ThresholdRecord {
            name: t.name.clone(),
            side: t.side,
            cut: t.cut,
            n_sample: t.n_sample,
            seed: t.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config: PipelineConfig,
    /// Stage deltas in execution order.
    pub stages: Vec<StageDelta>,
    pub dedup_params: DedupParams,
    pub thresholds: Vec<ThresholdRecord>,
    /// Families skipped as degenerate (only with skip_degenerate).
    pub skipped_families: Vec<String>,
    /// Characters with Script=Common/Inherited are retained by the script
    /// filter; recorded because the choice affects retention numbers.
    pub script_common_retained: bool,
    pub per_metric_thresholds: bool,
    /// False while a run is in flight or after a stage failed; outputs of an
    /// incomplete run are not comparable.
    pub completed: bool,
    pub failed_stage: Option<String>,
}

impl Manifest {
    pub fn new(config: &PipelineConfig) -> Self {
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            stages: Vec::new(),
            dedup_params: config.dedup.clone(),
            thresholds: Vec::new(),
            skipped_families: Vec::new(),
            script_common_retained: true,
            per_metric_thresholds: config.per_metric,
            completed: false,
            failed_stage: None,
        }
    }

    /// Appends a stage delta, enforcing canonical stage order.
    pub fn push_stage(&mut self, delta: StageDelta) {
        let rank = |name: &str| STAGE_ORDER.iter().position(|s| *s == name);
        let new_rank = rank(&delta.stage_name)
            .unwrap_or_else(|| panic!("unknown stage {}", delta.stage_name));
        if let Some(last) = self.stages.last() {
            let last_rank = rank(&last.stage_name).expect("stages already validated");
            assert!(
                new_rank > last_rank,
                "stage {} out of order after {}",
                delta.stage_name,
                last.stage_name
            );
        }
        self.stages.push(delta);
    }

    pub fn stage(&self, name: &str) -> Option<&StageDelta> {
        self.stages.iter().find(|s| s.stage_name == name)
    }

    /// Documents removed across the recorded primary stages; the size of
    /// the random control partition.
    pub fn primary_removed_docs(&self) -> u64 {
        match (self.stage(STAGE_SCRIPT), self.stage(STAGE_MINHASH)) {
            (Some(first), Some(last)) => first.docs_before - last.docs_after,
            _ => 0,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        let json = serde_json::to_string_pretty(self).map_err(|e| ManifestError::Invalid {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        std::fs::write(path, json).map_err(|e| ManifestError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| ManifestError::Invalid {
                path: path.to_path_buf(),
                msg: e.to_string(),
            })?;
        manifest.check(path)?;
        Ok(manifest)
    }

    /// Validates stage ordering and the shrink invariant.
    fn check(&self, path: &Path) -> Result<(), ManifestError> {
        let mut last_rank = None;
        for stage in &self.stages {
            let rank = STAGE_ORDER
                .iter()
                .position(|s| *s == stage.stage_name)
                .ok_or_else(|| ManifestError::Invalid {
                    path: path.to_path_buf(),
                    msg: format!("unknown stage {}", stage.stage_name),
                })?;
            if let Some(last) = last_rank {
                if rank <= last {
                    return Err(ManifestError::Invalid {
                        path: path.to_path_buf(),
                        msg: format!("stage {} out of order", stage.stage_name),
                    });
                }
            }
            last_rank = Some(rank);
            stage.validate().map_err(|e| ManifestError::Invalid {
                path: path.to_path_buf(),
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }
}
