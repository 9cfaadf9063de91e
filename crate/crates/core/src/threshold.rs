//! Automatic, language-agnostic threshold selection over score
//! distributions, and document pruning against the selected cuts.
//!
//! For a metric or family-score column: sort ascending, take the first
//! `n_sample = floor(frac * n_docs)` values as the outlier sample and
//! `n_sample` seeded uniform draws (with replacement) from the whole column
//! as the background sample, estimate a Gaussian KDE for both over
//! `n_sample` evenly spaced grid points spanning
//! `[min(outlier sample), max(background sample)]`, and place the cut at
//! the grid point where the two curves meet. That point is the smoothed
//! analogue of the histogram crossing between an outlier and a reference
//! distribution. The high side mirrors everything.
//!
//! Corpora smaller than 20 documents use the whole column as the sample.
//! All randomness is seeded; results are identical across runs and worker
//! counts.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusStats, Document, StageDelta};
use crate::heuristics::{Family, FamilyScores};

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("degenerate distribution; no threshold")]
    Degenerate,
    #[error("sample is empty")]
    EmptySample,
    #[error("bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
    #[error("values contain a non-finite entry")]
    NonFinite,
    #[error("missing score row for document {doc_id}")]
    MissingScore { doc_id: String },
    #[error("sample fraction must be in (0, 1], got {0}")]
    BadFraction(f64),
}

/// Which tail of the distribution is pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Low,
    High,
}

/// The two samples compared by the threshold objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdInputs {
    /// Full column, sorted ascending.
    pub values: Vec<f64>,
    pub n_docs: usize,
    pub n_sample: usize,
    /// The `n_sample` most extreme values on the pruned side (ascending).
    pub d_value: Vec<f64>,
    /// `n_sample` uniform draws from the full column, seeded.
    pub d_sample: Vec<f64>,
}

/// A selected cut plus the evidence behind it, for audits and plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Metric or family name the cut applies to.
    pub name: String,
    pub cut: f64,
    pub side: Side,
    pub n_sample: usize,
    pub seed: u64,
    /// Evaluation grid: `n_sample` evenly spaced points.
    pub grid: Vec<f64>,
    pub density_value: Vec<f64>,
    pub density_sample: Vec<f64>,
}

/// Gaussian kernel density estimate of `sample` at each point of `eval`:
/// `(1 / (m*h)) * sum_i phi((x - x_i) / h)`.
pub fn kde(sample: &[f64], eval: &[f64], bandwidth: f64) -> Result<Vec<f64>, ThresholdError> {
    if sample.is_empty() {
        return Err(ThresholdError::EmptySample);
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(ThresholdError::BadBandwidth(bandwidth));
    }
    let m = sample.len() as f64;
    let norm = 1.0 / (m * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    Ok(eval
        .iter()
        .map(|&x| {
            sample
                .iter()
                .map(|&xi| {
                    let z = (x - xi) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect())
}

/// Silverman's rule of thumb: `0.9 * min(sigma, IQR/1.34) * m^(-1/5)`.
///
/// Falls back to the non-zero spread measure when one of the two is zero;
/// returns 0 for constant or single-point samples (callers apply a floor).
pub fn silverman_bandwidth(sample: &[f64]) -> f64 {
    let m = sample.len();
    if m < 2 {
        return 0.0;
    }
    let mf = m as f64;
    let mean = sample.iter().sum::<f64>() / mf;
    let var = sample.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (mf - 1.0);
    let sigma = var.sqrt();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let robust = iqr / 1.34;
    let a = match (sigma > 0.0, robust > 0.0) {
        (true, true) => sigma.min(robust),
        (true, false) => sigma,
        (false, true) => robust,
        (false, false) => return 0.0,
    };
    0.9 * a * mf.powf(-0.2)
}

/// Linear-interpolation quantile of an ascending-sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// `count` evenly spaced points over `[lo, hi]`, endpoints exact.
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    grid[count - 1] = hi;
    grid
}

/// Builds the outlier and background samples for one column.
pub fn threshold_inputs(
    values: &[f64],
    side: Side,
    frac: f64,
    seed: u64,
) -> Result<ThresholdInputs, ThresholdError> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(ThresholdError::BadFraction(frac));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ThresholdError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n_docs = sorted.len();
    if n_docs < 2 || sorted[0] == sorted[n_docs - 1] {
        return Err(ThresholdError::Degenerate);
    }
    let n_sample = if n_docs < 20 {
        n_docs
    } else {
        ((frac * n_docs as f64).floor() as usize).max(1)
    };
    let d_value: Vec<f64> = match side {
        Side::Low => sorted[..n_sample].to_vec(),
        Side::High => sorted[n_docs - n_sample..].to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_sample: Vec<f64> = (0..n_sample)
        .map(|_| sorted[rng.gen_range(0..n_docs)])
        .collect();
    Ok(ThresholdInputs {
        values: sorted,
        n_docs,
        n_sample,
        d_value,
        d_sample,
    })
}

/// Selects the cut for one column.
///
/// The cut is the grid point minimizing `|density(D_value) -
/// density(D_sample)|`; ties resolve to the smallest grid point. Bandwidths
/// are Silverman per sample with a floor of `1e-6 * (max - min)` of the
/// full column for near-degenerate samples.
pub fn select_threshold(
    name: &str,
    values: &[f64],
    side: Side,
    frac: f64,
    seed: u64,
) -> Result<Threshold, ThresholdError> {
    let inputs = threshold_inputs(values, side, frac, seed)?;
    let full_range = inputs.values[inputs.n_docs - 1] - inputs.values[0];
    let floor = 1e-6 * full_range;

    let (lo, hi) = match side {
        Side::Low => (
            inputs.d_value[0],
            inputs.d_sample.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        Side::High => (
            inputs.d_sample.iter().copied().fold(f64::INFINITY, f64::min),
            inputs.d_value[inputs.d_value.len() - 1],
        ),
    };
    let grid = linspace(lo, hi, inputs.n_sample);

    let h_value = silverman_bandwidth(&inputs.d_value).max(floor);
    let h_sample = silverman_bandwidth(&inputs.d_sample).max(floor);
    let density_value = kde(&inputs.d_value, &grid, h_value)?;
    let density_sample = kde(&inputs.d_sample, &grid, h_sample)?;

    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for (i, (dv, ds)) in density_value.iter().zip(&density_sample).enumerate() {
        let gap = (dv - ds).abs();
        if gap < best_gap {
            best_gap = gap;
            best = i;
        }
    }
    Ok(Threshold {
        name: name.to_string(),
        cut: grid[best],
        side,
        n_sample: inputs.n_sample,
        seed,
        grid,
        density_value,
        density_sample,
    })
}

/// A cut to prune against, keyed by the name of the value it applies to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueCut {
    pub name: String,
    pub side: Side,
    pub cut: f64,
}

impl ValueCut {
    pub fn from_threshold(t: &Threshold) -> Self {
        ValueCut {
            name: t.name.clone(),
            side: t.side,
            cut: t.cut,
        }
    }

    /// Strictly below a low cut, or strictly above a high cut.
    pub fn removes(&self, value: f64) -> bool {
        match self.side {
            Side::Low => value < self.cut,
            Side::High => value > self.cut,
        }
    }
}

#[derive(Debug)]
pub struct PruneOutcome {
    pub kept: Vec<Document>,
    pub removed: Vec<Document>,
    pub delta: StageDelta,
}

/// Prunes documents whose value is strictly beyond any configured cut.
/// `value_of(doc_id, cut_name)` supplies the scored value; `None` for a
/// missing row is an error naming the document.
pub fn prune_by<F>(
    docs: Vec<Document>,
    cuts: &[ValueCut],
    stage_name: &str,
    value_of: F,
) -> Result<PruneOutcome, ThresholdError>
where
    F: Fn(&str, &str) -> Option<f64>,
{
    let before = CorpusStats::from_docs(&docs);
    let mut kept = Vec::with_capacity(docs.len());
    let mut removed = Vec::new();
    for doc in docs {
        let mut out = false;
        for cut in cuts {
            let value = value_of(&doc.id, &cut.name).ok_or_else(|| {
                ThresholdError::MissingScore {
                    doc_id: doc.id.clone(),
                }
            })?;
            if cut.removes(value) {
                out = true;
                break;
            }
        }
        if out {
            removed.push(doc);
        } else {
            kept.push(doc);
        }
    }
    let after = CorpusStats::from_docs(&kept);
    Ok(PruneOutcome {
        kept,
        removed,
        delta: StageDelta::new(stage_name, before, after),
    })
}

/// Family-score pruning: a document is removed if any configured family
/// score falls strictly beyond its cut.
pub fn prune(
    docs: Vec<Document>,
    scores: &[FamilyScores],
    thresholds: &[(Family, Threshold)],
    stage_name: &str,
) -> Result<PruneOutcome, ThresholdError> {
    let by_id: HashMap<&str, &FamilyScores> =
        scores.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    let cuts: Vec<ValueCut> = thresholds
        .iter()
        .map(|(family, t)| ValueCut {
            name: family.name().to_string(),
            side: t.side,
            cut: t.cut,
        })
        .collect();
    prune_by(docs, &cuts, stage_name, |doc_id, name| {
        let family: Family = name.parse().ok()?;
        by_id.get(doc_id).map(|s| s.get(family))
    })
}
