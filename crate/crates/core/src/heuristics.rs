//! Per-document heuristic quality metrics and family score aggregation.
//!
//! Seven surface metrics per document, grouped into three families:
//!
//! - absolute: length in characters, unique trigram count, unique word count
//! - relative: unique/total trigram ratio, unique/total word ratio
//!   (type-token ratio)
//! - entropy: Shannon entropy (bits) of the word trigram and word unigram
//!   distributions
//!
//! Family scores min-max normalize each metric against the observed corpus
//! extremes and sum within the family, so each score lies in `[0, K]` for a
//! K-metric family. Trigrams are word-level by default; a character-trigram
//! mode is available.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Csv { path: PathBuf, msg: String },
}

/// Splits on Unicode whitespace, dropping empty tokens. No case folding:
/// the metrics measure surface diversity.
pub fn tokenize_words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Empirical counts of consecutive n-token windows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NgramStats {
    /// Total n-gram count N; equals the sum of all counts.
    pub total: u64,
    pub counts: HashMap<String, u64>,
}

impl NgramStats {
    pub fn unique(&self) -> u64 {
        self.counts.len() as u64
    }
}

/// N-gram counts over `tokens`; `N = max(len - n + 1, 0)`.
pub fn ngram_stats(tokens: &[&str], n: usize) -> NgramStats {
    assert!(n >= 1, "n-gram width must be >= 1");
    if tokens.len() < n {
        return NgramStats::default();
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    for window in tokens.windows(n) {
        *counts.entry(window.join(" ")).or_insert(0) += 1;
    }
    NgramStats {
        total: (tokens.len() - n + 1) as u64,
        counts,
    }
}

/// Character-level n-grams over the raw text, for the char-trigram mode.
pub fn char_ngram_stats(text: &str, n: usize) -> NgramStats {
    assert!(n >= 1, "n-gram width must be >= 1");
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < n {
        return NgramStats::default();
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    for window in chars.windows(n) {
        *counts.entry(window.iter().collect()).or_insert(0) += 1;
    }
    NgramStats {
        total: (chars.len() - n + 1) as u64,
        counts,
    }
}

/// Shannon entropy in bits of the empirical n-gram distribution:
/// `-sum over t of (count(t)/N) * log2(count(t)/N)`; 0 when N = 0.
///
/// Counts are summed in sorted order so the result is bit-identical across
/// runs (map iteration order is not).
pub fn entropy(stats: &NgramStats) -> f64 {
    if stats.total == 0 {
        return 0.0;
    }
    let n = stats.total as f64;
    let mut counts: Vec<u64> = stats.counts.values().copied().collect();
    counts.sort_unstable();
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Basic unit for the trigram metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrigramUnit {
    Words,
    Chars,
}

impl std::str::FromStr for TrigramUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "words" => Ok(TrigramUnit::Words),
            "chars" => Ok(TrigramUnit::Chars),
            other => Err(format!("unknown trigram unit: {other}")),
        }
    }
}

/// The seven per-document metrics. Empty or degenerate documents score 0
/// everywhere so they sort to the prune-side tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub length: u64,
    pub unique_trigrams: u64,
    pub unique_words: u64,
    pub frac_unique_trigrams: f64,
    pub frac_unique_words: f64,
    pub trigram_entropy: f64,
    pub unigram_entropy: f64,
}

/// Column order used everywhere a metric matrix appears.
pub const METRIC_NAMES: [&str; 7] = [
    "length",
    "unique_trigrams",
    "unique_words",
    "frac_unique_trigrams",
    "frac_unique_words",
    "trigram_entropy",
    "unigram_entropy",
];

impl MetricVector {
    pub fn values(&self) -> [f64; 7] {
        [
            self.length as f64,
            self.unique_trigrams as f64,
            self.unique_words as f64,
            self.frac_unique_trigrams,
            self.frac_unique_words,
            self.trigram_entropy,
            self.unigram_entropy,
        ]
    }
}

/// Computes the full metric vector for one document.
pub fn compute_metrics(doc: &Document, unit: TrigramUnit) -> MetricVector {
    let tokens = tokenize_words(&doc.text);
    let word_count = tokens.len() as u64;
    let unique_words = tokens.iter().collect::<HashSet<_>>().len() as u64;
    let unigrams = ngram_stats(&tokens, 1);
    let trigrams = match unit {
        TrigramUnit::Words => ngram_stats(&tokens, 3),
        TrigramUnit::Chars => char_ngram_stats(&doc.text, 3),
    };
    let ratio = |unique: u64, total: u64| {
        if total == 0 {
            0.0
        } else {
            unique as f64 / total as f64
        }
    };
    MetricVector {
        length: doc.char_count(),
        unique_trigrams: trigrams.unique(),
        unique_words,
        frac_unique_trigrams: ratio(trigrams.unique(), trigrams.total),
        frac_unique_words: ratio(unique_words, word_count),
        trigram_entropy: entropy(&trigrams),
        unigram_entropy: entropy(&unigrams),
    }
}

/// Metric family ("class"): absolute counts, relative ratios, entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Absolute,
    Relative,
    Entropy,
}

pub const FAMILIES: [Family; 3] = [Family::Absolute, Family::Relative, Family::Entropy];

impl Family {
    /// Indices into the [`METRIC_NAMES`] column order.
    pub fn metric_indices(self) -> &'static [usize] {
        match self {
            Family::Absolute => &[0, 1, 2],
            Family::Relative => &[3, 4],
            Family::Entropy => &[5, 6],
        }
    }

    /// Number of metrics in the family; the family score's upper bound.
    pub fn k(self) -> usize {
        self.metric_indices().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Absolute => "absolute",
            Family::Relative => "relative",
            Family::Entropy => "entropy",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(Family::Absolute),
            "relative" => Ok(Family::Relative),
            "entropy" => Ok(Family::Entropy),
            other => Err(format!("unknown metric family: {other}")),
        }
    }
}

/// Per-document family scores S_ij.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyScores {
    pub doc_id: String,
    pub absolute: f64,
    pub relative: f64,
    pub entropy: f64,
}

impl FamilyScores {
    pub fn get(&self, family: Family) -> f64 {
        match family {
            Family::Absolute => self.absolute,
            Family::Relative => self.relative,
            Family::Entropy => self.entropy,
        }
    }
}

/// One scored document row; the unit of the persisted metric table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub doc_id: String,
    pub metrics: MetricVector,
}

/// Per-column normalization bounds. Defaults come from the observed corpus
/// extremes; explicit bounds support fixed cross-corpus comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds<const W: usize> {
    pub min: [f64; W],
    pub max: [f64; W],
}

impl<const W: usize> NormBounds<W> {
    pub fn observed(matrix: &[[f64; W]]) -> Self {
        let mut min = [f64::INFINITY; W];
        let mut max = [f64::NEG_INFINITY; W];
        for row in matrix {
            for (k, &v) in row.iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        NormBounds { min, max }
    }
}

/// Min-max normalizes every column against its observed corpus extremes.
/// A constant column normalizes to 0 for every document.
pub fn normalize_columns<const W: usize>(matrix: &[[f64; W]]) -> Vec<[f64; W]> {
    normalize_columns_with(matrix, &NormBounds::observed(matrix))
}

/// Min-max normalization against explicit bounds; values are clamped to
/// `[0, 1]` when they fall outside the supplied range.
pub fn normalize_columns_with<const W: usize>(
    matrix: &[[f64; W]],
    bounds: &NormBounds<W>,
) -> Vec<[f64; W]> {
    matrix
        .iter()
        .map(|row| {
            let mut out = [0.0; W];
            for (k, &v) in row.iter().enumerate() {
                let range = bounds.max[k] - bounds.min[k];
                out[k] = if range > 0.0 {
                    ((v - bounds.min[k]) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
            out
        })
        .collect()
}

/// Family scores for every document: each raw metric min-max normalized
/// across the corpus, then summed within its family.
pub fn family_scores(rows: &[MetricRow]) -> Vec<FamilyScores> {
    let matrix: Vec<[f64; 7]> = rows.iter().map(|r| r.metrics.values()).collect();
    family_scores_normalized(rows, normalize_columns(&matrix))
}

/// Family scores against user-supplied normalization bounds.
pub fn family_scores_with_bounds(rows: &[MetricRow], bounds: &NormBounds<7>) -> Vec<FamilyScores> {
    let matrix: Vec<[f64; 7]> = rows.iter().map(|r| r.metrics.values()).collect();
    family_scores_normalized(rows, normalize_columns_with(&matrix, bounds))
}

fn family_scores_normalized(rows: &[MetricRow], normalized: Vec<[f64; 7]>) -> Vec<FamilyScores> {
    rows.iter()
        .zip(&normalized)
        .map(|(row, norm)| {
            let sum = |family: Family| -> f64 {
                family.metric_indices().iter().map(|&k| norm[k]).sum()
            };
            FamilyScores {
                doc_id: row.doc_id.clone(),
                absolute: sum(Family::Absolute),
                relative: sum(Family::Relative),
                entropy: sum(Family::Entropy),
            }
        })
        .collect()
}

/// Writes the metric table as CSV: doc_id, the seven metrics, and the three
/// family score columns. This file feeds thresholding and the distribution
/// reports.
pub fn write_metrics_csv(
    path: &Path,
    rows: &[MetricRow],
    scores: &[FamilyScores],
) -> Result<(), MetricsError> {
    assert_eq!(rows.len(), scores.len(), "row/score tables must align");
    let mut writer = csv::Writer::from_path(path).map_err(|e| MetricsError::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let mut header = vec!["doc_id"];
    header.extend(METRIC_NAMES);
    header.extend(["score_absolute", "score_relative", "score_entropy"]);
    let write_err = |e: csv::Error| MetricsError::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    };
    writer.write_record(&header).map_err(write_err)?;
    for (row, score) in rows.iter().zip(scores) {
        let values = row.metrics.values();
        let mut record = vec![row.doc_id.clone()];
        record.push(row.metrics.length.to_string());
        record.push(row.metrics.unique_trigrams.to_string());
        record.push(row.metrics.unique_words.to_string());
        for v in &values[3..] {
            record.push(format!("{v:.12}"));
        }
        record.push(format!("{:.12}", score.absolute));
        record.push(format!("{:.12}", score.relative));
        record.push(format!("{:.12}", score.entropy));
        writer.write_record(&record).map_err(write_err)?;
    }
    writer.flush().map_err(|e| MetricsError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads back a metric table written by [`write_metrics_csv`].
pub fn read_metrics_csv(path: &Path) -> Result<(Vec<MetricRow>, Vec<FamilyScores>), MetricsError> {
    let err = |msg: String| MetricsError::Csv {
        path: path.to_path_buf(),
        msg,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let mut rows = Vec::new();
    let mut scores = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.to_string()))?;
        if record.len() != 11 {
            return Err(err(format!("expected 11 columns, found {}", record.len())));
        }
        let field = |i: usize| -> Result<f64, MetricsError> {
            record[i]
                .parse::<f64>()
                .map_err(|e| err(format!("column {i}: {e}")))
        };
        rows.push(MetricRow {
            doc_id: record[0].to_string(),
            metrics: MetricVector {
                length: field(1)? as u64,
                unique_trigrams: field(2)? as u64,
                unique_words: field(3)? as u64,
                frac_unique_trigrams: field(4)?,
                frac_unique_words: field(5)?,
                trigram_entropy: field(6)?,
                unigram_entropy: field(7)?,
            },
        });
        scores.push(FamilyScores {
            doc_id: record[0].to_string(),
            absolute: field(8)?,
            relative: field(9)?,
            entropy: field(10)?,
        });
    }
    Ok((rows, scores))
}
