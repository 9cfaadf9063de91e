//! Small CSV/table loaders for the analysis inputs.

use std::collections::BTreeMap;
use std::path::Path;

use wikiclean::analysis::{RetentionPoint, WikiEditStats};
use wikiclean::heuristics::{NormBounds, METRIC_NAMES};

use crate::error::CliError;

/// `wiki,bot_ratio` rows.
pub fn load_bot_ratios(path: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        if record.len() < 2 {
            return Err(CliError::data(format!(
                "{}: expected wiki,bot_ratio rows",
                path.display()
            )));
        }
        let ratio: f64 = record[1]
            .parse()
            .map_err(|e| CliError::data(format!("{}: bot_ratio: {e}", path.display())))?;
        out.insert(record[0].to_string(), ratio);
    }
    Ok(out)
}

/// `wiki,editors,edits,total_pages,articles,non_articles` rows.
pub fn load_edit_stats(path: &Path) -> Result<Vec<(String, WikiEditStats)>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        if record.len() < 6 {
            return Err(CliError::data(format!(
                "{}: expected wiki,editors,edits,total_pages,articles,non_articles",
                path.display()
            )));
        }
        let field = |i: usize| -> Result<u64, CliError> {
            record[i]
                .parse()
                .map_err(|e| CliError::data(format!("{}: column {i}: {e}", path.display())))
        };
        let stats = WikiEditStats {
            editors: field(1)?,
            edits: field(2)?,
            total_pages: field(3)?,
            articles: field(4)?,
            non_articles: field(5)?,
        };
        stats.validate().map_err(CliError::from)?;
        out.push((record[0].to_string(), stats));
    }
    Ok(out)
}

/// Retention points from a `retention.csv` written by the report.
pub fn load_retention(path: &Path) -> Result<Vec<RetentionPoint>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| -> Result<usize, CliError> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::data(format!("{}: missing column {name}", path.display()))
        })
    };
    let (wiki_col, docs_col, chars_col, weight_col) = (
        col("wiki")?,
        col("frac_docs_retained")?,
        col("frac_chars_retained")?,
        col("weight")?,
    );
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            record[i]
                .parse()
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
        };
        out.push(RetentionPoint {
            wiki: record[wiki_col].to_string(),
            frac_docs_retained: parse(docs_col)?,
            frac_chars_retained: parse(chars_col)?,
            weight: parse(weight_col)? as u64,
        });
    }
    Ok(out)
}

/// Normalization bounds file: `metric: min, max` lines; metrics left out
/// keep their observed extremes (signalled by NaN, resolved by the caller).
pub fn load_bounds(path: &Path, observed: NormBounds<7>) -> Result<NormBounds<7>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut bounds = observed;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (name, rest) = content.split_once(':').ok_or_else(|| {
            CliError::data(format!("{}:{line}: expected `metric: min, max`", path.display()))
        })?;
        let metric = METRIC_NAMES
            .iter()
            .position(|m| *m == name.trim())
            .ok_or_else(|| {
                CliError::data(format!("{}:{line}: unknown metric {}", path.display(), name.trim()))
            })?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(CliError::data(format!(
                "{}:{line}: expected `metric: min, max`",
                path.display()
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|e| CliError::data(format!("{}:{line}: {e}", path.display())))
        };
        bounds.min[metric] = parse(parts[0])?;
        bounds.max[metric] = parse(parts[1])?;
    }
    Ok(bounds)
}
