//! The report bundle: data files behind the retention, tier, dedup-vs-bot,
//! and family-distribution figures, plus optional static SVG renderings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    depth_plus, retention_table, spearman, tier_cluster, RetentionPoint, WikiEditStats,
};
use crate::heuristics::{read_metrics_csv, FAMILIES};
use crate::threshold::silverman_bandwidth;

use super::svg;
use super::{Manifest, PipelineError, STAGE_MINHASH};

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Also render simple static SVG plots.
    pub svg: bool,
    /// Seed and restarts for the tier clustering.
    pub seed: u64,
    pub restarts: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            svg: false,
            seed: 0,
            restarts: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub pair: String,
    pub rho: f64,
    pub p: f64,
    pub n: usize,
}

/// Machine-readable report summary, written as `report.json`.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct ReportSummary {
    pub wikis: usize,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub correlations: Vec<CorrelationRecord>,
}

/// Emits the report bundle for a set of per-wiki manifests.
///
/// Always writes `retention.csv` and `report.json`; writes `tiers.csv` +
/// `centroids.csv` when at least four wikis cluster, the bot-ratio scatter
/// when `bot_ratios` is supplied, `depth.csv` when edit stats are supplied,
/// and per-family histogram/KDE data for every supplied metric table.
pub fn report(
    out_dir: &Path,
    manifests: &[(String, Manifest)],
    metric_tables: &[(String, PathBuf)],
    bot_ratios: Option<&BTreeMap<String, f64>>,
    edit_stats: Option<&[(String, WikiEditStats)]>,
    options: &ReportOptions,
) -> Result<ReportSummary, PipelineError> {
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let mut summary = ReportSummary {
        wikis: manifests.len(),
        ..ReportSummary::default()
    };

    let completed: Vec<(String, Vec<crate::corpus::StageDelta>)> = manifests
        .iter()
        .filter(|(wiki, m)| {
            if m.completed {
                true
            } else {
                summary
                    .notes
                    .push(format!("skipped incomplete manifest for {wiki}"));
                false
            }
        })
        .map(|(wiki, m)| (wiki.clone(), m.stages.clone()))
        .collect();
    let points = retention_table(&completed)?;

    write_retention_csv(out_dir, &completed, &points, &mut summary)?;
    write_tiers(out_dir, &points, options, &mut summary)?;
    if let Some(ratios) = bot_ratios {
        write_bot_scatter(out_dir, manifests, ratios, options, &mut summary)?;
    }
    if let Some(stats) = edit_stats {
        write_depth(out_dir, &points, stats, &mut summary)?;
    }
    write_family_distributions(out_dir, metric_tables, options, &mut summary)?;

    let correlations_path = out_dir.join("correlations.json");
    let json = serde_json::to_string_pretty(&summary.correlations).expect("serializable");
    std::fs::write(&correlations_path, json)
        .map_err(|e| PipelineError::Io { path: correlations_path, source: e })?;
    summary.files.push("correlations.json".into());

    let report_path = out_dir.join("report.json");
    summary.files.push("report.json".into());
    let json = serde_json::to_string_pretty(&summary).expect("serializable");
    std::fs::write(&report_path, json)
        .map_err(|e| PipelineError::Io { path: report_path, source: e })?;
    Ok(summary)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, PipelineError> {
    csv::Writer::from_path(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })
}

fn csv_err(path: &Path, e: csv::Error) -> PipelineError {
    PipelineError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn write_retention_csv(
    out_dir: &Path,
    completed: &[(String, Vec<crate::corpus::StageDelta>)],
    points: &[RetentionPoint],
    summary: &mut ReportSummary,
) -> Result<(), PipelineError> {
    let path = out_dir.join("retention.csv");
    let mut w = csv_writer(&path)?;
    w.write_record([
        "wiki",
        "docs_before",
        "docs_after",
        "chars_before",
        "chars_after",
        "frac_docs_retained",
        "frac_chars_retained",
        "weight",
    ])
    .map_err(|e| csv_err(&path, e))?;
    for ((wiki, stages), point) in completed.iter().zip(points) {
        let first = stages.first().expect("complete manifest has stages");
        let last = stages
            .iter()
            .find(|s| s.stage_name == STAGE_MINHASH)
            .expect("validated by retention_table");
        w.write_record([
            wiki.as_str(),
            &first.docs_before.to_string(),
            &last.docs_after.to_string(),
            &first.chars_before.to_string(),
            &last.chars_after.to_string(),
            &format!("{:.6}", point.frac_docs_retained),
            &format!("{:.6}", point.frac_chars_retained),
            &point.weight.to_string(),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io_from(&path, e))?;
    summary.files.push("retention.csv".into());
    Ok(())
}

fn write_tiers(
    out_dir: &Path,
    points: &[RetentionPoint],
    options: &ReportOptions,
    summary: &mut ReportSummary,
) -> Result<(), PipelineError> {
    let assignment = match tier_cluster(points, options.seed, options.restarts) {
        Ok(a) => a,
        Err(e) => {
            summary.notes.push(format!("tier clustering skipped: {e}"));
            return Ok(());
        }
    };
    let path = out_dir.join("tiers.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["wiki", "frac_docs_retained", "frac_chars_retained", "weight", "tier"])
        .map_err(|e| csv_err(&path, e))?;
    for p in points {
        w.write_record([
            p.wiki.as_str(),
            &format!("{:.6}", p.frac_docs_retained),
            &format!("{:.6}", p.frac_chars_retained),
            &p.weight.to_string(),
            &assignment.tiers[&p.wiki].to_string(),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io_from(&path, e))?;
    summary.files.push("tiers.csv".into());

    let path = out_dir.join("centroids.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["tier", "frac_docs_retained", "frac_chars_retained"])
        .map_err(|e| csv_err(&path, e))?;
    for (i, c) in assignment.centroids.iter().enumerate() {
        w.write_record([
            &(i + 1).to_string(),
            &format!("{:.6}", c[0]),
            &format!("{:.6}", c[1]),
        ])
        .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io_from(&path, e))?;
    summary.files.push("centroids.csv".into());

    if options.svg {
        let series: Vec<(f64, f64, u8)> = points
            .iter()
            .map(|p| (p.frac_docs_retained, p.frac_chars_retained, assignment.tiers[&p.wiki]))
            .collect();
        let path = out_dir.join("tiers.svg");
        svg::scatter(
            &path,
            "Retention tiers",
            "fraction of documents retained",
            "fraction of characters retained",
            &series,
        )
        .map_err(|e| PipelineError::io_from(&path, e))?;
        summary.files.push("tiers.svg".into());
    }
    Ok(())
}

fn write_bot_scatter(
    out_dir: &Path,
    manifests: &[(String, Manifest)],
    ratios: &BTreeMap<String, f64>,
    options: &ReportOptions,
    summary: &mut ReportSummary,
) -> Result<(), PipelineError> {
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    for (wiki, manifest) in manifests {
        let (Some(stage), Some(&ratio)) = (manifest.stage(STAGE_MINHASH), ratios.get(wiki))
        else {
            continue;
        };
        rows.push((wiki.clone(), 1.0 - stage.frac_docs_retained(), ratio));
    }
    let path = out_dir.join("minhash_vs_bot.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["wiki", "frac_docs_removed_minhash", "bot_ratio"])
        .map_err(|e| csv_err(&path, e))?;
    for (wiki, removed, ratio) in &rows {
        w.write_record([wiki.as_str(), &format!("{removed:.6}"), &format!("{ratio:.6}")])
            .map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io_from(&path, e))?;
    summary.files.push("minhash_vs_bot.csv".into());

    let removed: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ratio: Vec<f64> = rows.iter().map(|r| r.2).collect();
    match spearman(&removed, &ratio) {
        Ok((rho, p)) => summary.correlations.push(CorrelationRecord {
            pair: "minhash_removed_vs_bot_ratio".into(),
            rho,
            p,
            n: rows.len(),
        }),
        Err(e) => summary
            .notes
            .push(format!("minhash/bot correlation unavailable: {e}")),
    }
    if options.svg {
        let series: Vec<(f64, f64, u8)> = rows.iter().map(|r| (r.2, r.1, 1)).collect();
        let path = out_dir.join("minhash_vs_bot.svg");
        svg::scatter(
            &path,
            "MinHash removal vs bot ratio",
            "bot article ratio",
            "fraction of documents removed by MinHash",
            &series,
        )
        .map_err(|e| PipelineError::io_from(&path, e))?;
        summary.files.push("minhash_vs_bot.svg".into());
    }
    Ok(())
}

/// Writes `depth.csv` (the five activity counts plus Depth+ per wiki) and
/// returns the computed Depth+ values.
pub fn write_depth_csv(
    path: &Path,
    stats: &[(String, WikiEditStats)],
) -> Result<Vec<(String, f64)>, PipelineError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "wiki",
        "editors",
        "edits",
        "total_pages",
        "articles",
        "non_articles",
        "depth_plus",
    ])
    .map_err(|e| csv_err(path, e))?;
    let mut values = Vec::with_capacity(stats.len());
    for (wiki, s) in stats {
        let value = depth_plus(s)?;
        values.push((wiki.clone(), value));
        w.write_record([
            wiki.as_str(),
            &s.editors.to_string(),
            &s.edits.to_string(),
            &s.total_pages.to_string(),
            &s.articles.to_string(),
            &s.non_articles.to_string(),
            &format!("{value:.6}"),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io_from(path, e))?;
    Ok(values)
}

fn write_depth(
    out_dir: &Path,
    points: &[RetentionPoint],
    stats: &[(String, WikiEditStats)],
    summary: &mut ReportSummary,
) -> Result<(), PipelineError> {
    let path = out_dir.join("depth.csv");
    let depth_values = write_depth_csv(&path, stats)?;
    let depth_by_wiki: BTreeMap<&str, f64> = depth_values
        .iter()
        .map(|(wiki, v)| (wiki.as_str(), *v))
        .collect();
    summary.files.push("depth.csv".into());

    // Correlate retention with Depth+ over the wikis present in both.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in points {
        if let Some(&d) = depth_by_wiki.get(p.wiki.as_str()) {
            xs.push(p.frac_docs_retained);
            ys.push(d);
        }
    }
    match spearman(&xs, &ys) {
        Ok((rho, p)) => summary.correlations.push(CorrelationRecord {
            pair: "retention_docs_vs_depth_plus".into(),
            rho,
            p,
            n: xs.len(),
        }),
        Err(e) => summary
            .notes
            .push(format!("retention/depth correlation unavailable: {e}")),
    }
    Ok(())
}

/// Per-family histogram and KDE curves of the family scores, long format,
/// one row per (wiki, family, bin/grid point).
fn write_family_distributions(
    out_dir: &Path,
    metric_tables: &[(String, PathBuf)],
    options: &ReportOptions,
    summary: &mut ReportSummary,
) -> Result<(), PipelineError> {
    if metric_tables.is_empty() {
        return Ok(());
    }
    let hist_path = out_dir.join("family_hist.csv");
    let kde_path = out_dir.join("family_kde.csv");
    let mut hist = csv_writer(&hist_path)?;
    let mut kde_w = csv_writer(&kde_path)?;
    hist.write_record(["wiki", "family", "bin_lo", "bin_hi", "count"])
        .map_err(|e| csv_err(&hist_path, e))?;
    kde_w
        .write_record(["wiki", "family", "x", "density"])
        .map_err(|e| csv_err(&kde_path, e))?;

    let mut kde_series: BTreeMap<&'static str, Vec<KdeCurve>> = BTreeMap::new();
    for (wiki, table_path) in metric_tables {
        let (_, scores) = read_metrics_csv(table_path)?;
        if scores.is_empty() {
            summary.notes.push(format!("{wiki}: empty metric table"));
            continue;
        }
        for family in FAMILIES {
            let values: Vec<f64> = scores.iter().map(|s| s.get(family)).collect();
            let (lo, hi) = bounds(&values);
            // Histogram: 30 equal bins.
            let bins = 30usize;
            let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
            let mut counts = vec![0u64; bins];
            for &v in &values {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
            for (b, count) in counts.iter().enumerate() {
                hist.write_record([
                    wiki.as_str(),
                    family.name(),
                    &format!("{:.6}", lo + b as f64 * width),
                    &format!("{:.6}", lo + (b + 1) as f64 * width),
                    &count.to_string(),
                ])
                .map_err(|e| csv_err(&hist_path, e))?;
            }
            // KDE over 100 grid points; degenerate columns are noted.
            let bandwidth = silverman_bandwidth(&values).max(1e-9 * (hi - lo).max(1e-9));
            let grid: Vec<f64> = (0..100)
                .map(|i| lo + (hi - lo) * i as f64 / 99.0)
                .collect();
            match crate::threshold::kde(&values, &grid, bandwidth) {
                Ok(density) => {
                    let mut curve = Vec::with_capacity(grid.len());
                    for (x, d) in grid.iter().zip(&density) {
                        kde_w
                            .write_record([
                                wiki.as_str(),
                                family.name(),
                                &format!("{x:.6}"),
                                &format!("{d:.6}"),
                            ])
                            .map_err(|e| csv_err(&kde_path, e))?;
                        curve.push((*x, *d));
                    }
                    kde_series
                        .entry(family.name())
                        .or_default()
                        .push((wiki.clone(), curve));
                }
                Err(e) => summary
                    .notes
                    .push(format!("{wiki}/{}: kde unavailable: {e}", family.name())),
            }
        }
    }
    hist.flush().map_err(|e| PipelineError::io_from(&hist_path, e))?;
    kde_w.flush().map_err(|e| PipelineError::io_from(&kde_path, e))?;
    summary.files.push("family_hist.csv".into());
    summary.files.push("family_kde.csv".into());

    if options.svg {
        for (family, series) in kde_series {
            let path = out_dir.join(format!("family_kde_{family}.svg"));
            svg::lines(
                &path,
                &format!("{family} family score distribution"),
                "family score",
                "density",
                &series,
            )
            .map_err(|e| PipelineError::io_from(&path, e))?;
            summary.files.push(format!("family_kde_{family}.svg"));
        }
    }
    Ok(())
}

type KdeCurve = (String, Vec<(f64, f64)>);

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

impl PipelineError {
    fn io_from(path: &Path, e: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source: e,
        }
    }
}
