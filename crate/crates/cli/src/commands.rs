use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use wikiclean::analysis::tier_cluster;
use wikiclean::corpus::{self, CorpusFormat, Document};
use wikiclean::heuristics::{
    compute_metrics, family_scores, family_scores_with_bounds, read_metrics_csv,
    write_metrics_csv, MetricRow, NormBounds, TrigramUnit, FAMILIES, METRIC_NAMES,
};
use wikiclean::pipeline::{
    self, report, Manifest, PipelineConfig, SideSpec, STAGE_MINHASH,
};
use wikiclean::threshold::{select_threshold, Threshold, ThresholdError};
use wikiclean::wikixml::WikiXmlReader;

use crate::error::CliError;
use crate::tables;

#[derive(Parser)]
#[command(
    name = "wikiclean",
    version,
    about = "Corpus quality filtering for multilingual wiki dumps",
    long_about = "Filters a document corpus in two stages (script filtering plus exact and \
                  MinHash deduplication, then heuristic metric pruning with automatic \
                  KDE thresholds) and emits retention, tier, and correlation reports.\n\n\
                  Exit codes: 0 success, 1 usage/config error, 2 data error, \
                  3 degenerate-distribution error."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a MediaWiki export XML dump to the JSONL corpus format
    Extract(ExtractArgs),
    /// Run the primary filters: script filter, exact dedup, MinHash dedup
    Primary(ConfigArgs),
    /// Score, threshold, and prune a +primary corpus
    Heuristic(HeuristicArgs),
    /// Remove n random documents from the raw corpus (the control partition)
    RandomControl(ControlArgs),
    /// Compute the per-document metric table and family scores
    Score(ScoreArgs),
    /// Select automatic thresholds from a metric table
    Threshold(ThresholdArgs),
    /// Cluster wikis into four quality tiers by retention
    Tier(TierArgs),
    /// Compute Depth+ from a wiki activity statistics table
    Depth(DepthArgs),
    /// Correlate retention with Depth+ and bot ratios
    Correlate(CorrelateArgs),
    /// Emit the full report bundle from one or more finished runs
    Report(ReportArgs),
    /// Run the whole pipeline: primary, heuristic, control, report
    RunAll(ConfigArgs),
}

/// Config file plus per-key overrides; any flag beats its config entry.
#[derive(Args)]
struct ConfigArgs {
    /// Config file (plain-text key = value with [section] headers)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input corpus path
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format: jsonl or wiki-xml
    #[arg(long)]
    format: Option<String>,
    /// Language code forced onto every document
    #[arg(long)]
    lang: Option<String>,
    /// Custom script registry file layered over the built-in table
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Strip wiki markup from article text before filtering
    #[arg(long)]
    strip_markup: bool,
    /// Output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = machine cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Jaccard similarity cutoff for near-duplicates
    #[arg(long)]
    dedup_threshold: Option<f64>,
    /// MinHash permutation count
    #[arg(long)]
    permutations: Option<usize>,
    /// LSH band count
    #[arg(long)]
    bands: Option<usize>,
    /// LSH rows per band
    #[arg(long)]
    rows: Option<usize>,
    /// Words per shingle
    #[arg(long)]
    shingle_words: Option<usize>,
    /// MinHash permutation seed
    #[arg(long)]
    dedup_seed: Option<u64>,
    /// Verify candidate pairs with exact Jaccard instead of the estimate
    #[arg(long)]
    exact_verify: bool,
    /// Trigram unit for the heuristic metrics: words or chars
    #[arg(long)]
    trigram_unit: Option<String>,
    /// Threshold each raw metric instead of the family scores
    #[arg(long)]
    per_metric: bool,
    /// Disable heuristic thresholds (the stage passes everything through)
    #[arg(long)]
    no_thresholds: bool,
    /// Outlier sample fraction for threshold selection
    #[arg(long)]
    frac: Option<f64>,
    /// Threshold sampling seed
    #[arg(long)]
    seed: Option<u64>,
    /// Pruned side per family, e.g. --side entropy=both (repeatable)
    #[arg(long)]
    side: Vec<String>,
    /// Skip families with degenerate score distributions instead of failing
    #[arg(long)]
    skip_degenerate: bool,
    /// Random control partition seed
    #[arg(long)]
    control_seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(input) = &self.input {
            config.input = input.clone();
        }
        if let Some(format) = &self.format {
            config.format = format
                .parse::<CorpusFormat>()
                .map_err(CliError::Usage)?;
        }
        if let Some(lang) = &self.lang {
            config.lang = Some(lang.clone());
        }
        if let Some(registry) = &self.registry {
            config.registry = Some(registry.clone());
        }
        if self.strip_markup {
            config.strip_markup = true;
        }
        if let Some(out_dir) = &self.out_dir {
            config.out_dir = out_dir.clone();
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if let Some(v) = self.dedup_threshold {
            config.dedup.threshold = v;
        }
        if let Some(v) = self.permutations {
            config.dedup.permutations = v;
        }
        if let Some(v) = self.bands {
            config.dedup.bands = v;
        }
        if let Some(v) = self.rows {
            config.dedup.rows = v;
        }
        if let Some(v) = self.shingle_words {
            config.dedup.shingle_words = v;
        }
        if let Some(v) = self.dedup_seed {
            config.dedup.seed = v;
        }
        if self.exact_verify {
            config.dedup.exact_verify = true;
        }
        if let Some(unit) = &self.trigram_unit {
            config.trigram_unit = unit.parse::<TrigramUnit>().map_err(CliError::Usage)?;
        }
        if self.per_metric {
            config.per_metric = true;
        }
        if self.no_thresholds {
            config.thresholds_enabled = false;
        }
        if let Some(v) = self.frac {
            config.threshold_frac = v;
        }
        if let Some(v) = self.seed {
            config.threshold_seed = v;
        }
        for entry in &self.side {
            let (family, side) = parse_side(entry)?;
            config.sides.insert(family, side);
        }
        if self.skip_degenerate {
            config.skip_degenerate = true;
        }
        if let Some(v) = self.control_seed {
            config.control_seed = v;
        }
        init_workers(config.workers);
        Ok(config)
    }
}

fn parse_side(entry: &str) -> Result<(wikiclean::heuristics::Family, SideSpec), CliError> {
    let (family, side) = entry.split_once('=').ok_or_else(|| {
        CliError::Usage(format!("--side expects family=low|high|both, got {entry}"))
    })?;
    Ok((
        family.parse().map_err(CliError::Usage)?,
        side.parse().map_err(CliError::Usage)?,
    ))
}

fn init_workers(workers: usize) {
    if workers > 0 {
        // Ignore the error when a pool already exists (tests, repeat calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

#[derive(Args)]
struct ExtractArgs {
    /// MediaWiki export XML file
    #[arg(long)]
    input: PathBuf,
    /// Output JSONL corpus
    #[arg(long)]
    output: PathBuf,
    /// Language code override (defaults to the dump's xml:lang)
    #[arg(long)]
    lang: Option<String>,
    /// Strip wiki markup from the extracted text
    #[arg(long)]
    strip_markup: bool,
}

#[derive(Args)]
struct HeuristicArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// +primary corpus (defaults to <out_dir>/primary.jsonl)
    #[arg(long)]
    primary: Option<PathBuf>,
    /// Manifest to extend (defaults to <out_dir>/manifest.json)
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct ControlArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Documents to remove (defaults to the primary-stage removals
    /// recorded in the manifest)
    #[arg(long)]
    n_remove: Option<usize>,
    /// Output corpus (defaults to <out_dir>/control.jsonl)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Input JSONL corpus
    #[arg(long)]
    input: PathBuf,
    /// Output metric table CSV
    #[arg(long)]
    output: PathBuf,
    /// Trigram unit: words or chars
    #[arg(long, default_value = "words")]
    trigram_unit: String,
    /// Normalization bounds file (`metric: min, max` lines); metrics not
    /// listed keep the observed corpus extremes
    #[arg(long)]
    bounds: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Metric table CSV produced by `score` (or a pipeline run)
    #[arg(long)]
    metrics: PathBuf,
    /// Output thresholds JSON
    #[arg(long)]
    output: PathBuf,
    /// Outlier sample fraction
    #[arg(long, default_value_t = 0.05)]
    frac: f64,
    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pruned side per family, e.g. --side entropy=both (repeatable)
    #[arg(long)]
    side: Vec<String>,
    /// Threshold each raw metric instead of the family scores
    #[arg(long)]
    per_metric: bool,
    /// Skip degenerate columns instead of failing
    #[arg(long)]
    skip_degenerate: bool,
}

#[derive(Args)]
struct TierArgs {
    /// retention.csv produced by `report`
    #[arg(long)]
    retention: PathBuf,
    /// Output directory for tiers.csv and centroids.csv
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Ignore article-count weights (every wiki counts equally)
    #[arg(long)]
    unweighted: bool,
}

#[derive(Args)]
struct DepthArgs {
    /// CSV with wiki,editors,edits,total_pages,articles,non_articles rows
    #[arg(long)]
    stats: PathBuf,
    /// Output depth.csv
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Directory of per-wiki run directories (<dir>/<wiki>/manifest.json)
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Explicit wiki=run-dir pairs (repeatable)
    #[arg(long)]
    run: Vec<String>,
    /// Bot-article ratio CSV (wiki,bot_ratio)
    #[arg(long)]
    bots: Option<PathBuf>,
    /// Wiki activity statistics CSV for Depth+
    #[arg(long)]
    edit_stats: Option<PathBuf>,
    /// Output correlations JSON
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory of per-wiki run directories (<dir>/<wiki>/manifest.json)
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Explicit wiki=run-dir pairs (repeatable)
    #[arg(long)]
    run: Vec<String>,
    /// Bot-article ratio CSV (wiki,bot_ratio)
    #[arg(long)]
    bots: Option<PathBuf>,
    /// Wiki activity statistics CSV for Depth+
    #[arg(long)]
    edit_stats: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out_dir: PathBuf,
    /// Also render static SVG plots
    #[arg(long)]
    svg: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract(args) => extract(args),
        Command::Primary(args) => primary(args),
        Command::Heuristic(args) => heuristic(args),
        Command::RandomControl(args) => random_control(args),
        Command::Score(args) => score(args),
        Command::Threshold(args) => threshold(args),
        Command::Tier(args) => tier(args),
        Command::Depth(args) => depth(args),
        Command::Correlate(args) => correlate(args),
        Command::Report(args) => report_cmd(args),
        Command::RunAll(args) => run_all(args),
    }
}

fn extract(args: ExtractArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::data(format!("{}: {e}", args.input.display())))?;
    let mut reader = WikiXmlReader::new(std::io::BufReader::new(file));
    if let Some(lang) = &args.lang {
        reader = reader.with_lang(lang.clone());
    }
    let mut docs: Vec<Document> = Vec::new();
    for item in &mut reader {
        let mut doc = item?;
        if args.strip_markup {
            doc.text = wikiclean::markup::strip_markup(&doc.text);
        }
        docs.push(doc);
    }
    let stats = corpus::write_corpus(docs, &args.output)?;
    println!(
        "extracted {} articles ({} chars) from {} pages; skipped {} without text, {} other-namespace",
        stats.doc_count,
        stats.char_count,
        reader.pages_seen(),
        reader.skipped_no_text(),
        reader.skipped_namespace()
    );
    Ok(())
}

fn print_stages(manifest: &Manifest) {
    for stage in &manifest.stages {
        println!(
            "{}: {} -> {} docs, {} -> {} chars",
            stage.stage_name,
            stage.docs_before,
            stage.docs_after,
            stage.chars_before,
            stage.chars_after
        );
    }
}

fn warn_skipped(manifest: &Manifest) {
    for name in &manifest.skipped_families {
        eprintln!("warning: {name}: degenerate distribution, not thresholded");
    }
}

fn primary(args: ConfigArgs) -> Result<(), CliError> {
    let config = args.resolve()?;
    let outcome = pipeline::run_primary(&config)?;
    print_stages(&outcome.manifest);
    println!("wrote {}", config.out_dir.join("primary.jsonl").display());
    Ok(())
}

fn heuristic(args: HeuristicArgs) -> Result<(), CliError> {
    let config = args.config.resolve()?;
    let primary_path = args
        .primary
        .unwrap_or_else(|| config.out_dir.join("primary.jsonl"));
    let manifest_path = args
        .manifest
        .unwrap_or_else(|| config.out_dir.join("manifest.json"));
    let docs = corpus::collect_corpus(&primary_path, CorpusFormat::Jsonl)?;
    let mut manifest = Manifest::load(&manifest_path)?;
    let outcome = pipeline::run_heuristic(&config, docs, &mut manifest)?;
    print_stages(&manifest);
    for t in &outcome.thresholds {
        println!("threshold {} ({:?}): {:.6}", t.name, t.side, t.cut);
    }
    warn_skipped(&manifest);
    println!("wrote {}", config.out_dir.join("heuristic.jsonl").display());
    Ok(())
}

fn random_control(args: ControlArgs) -> Result<(), CliError> {
    let config = args.config.resolve()?;
    config.validate()?;
    let docs = pipeline::load_corpus(&config)?;
    let n_remove = match args.n_remove {
        Some(n) => n,
        None => {
            let manifest = Manifest::load(&config.out_dir.join("manifest.json"))?;
            manifest.primary_removed_docs() as usize
        }
    };
    let control = pipeline::run_random_control(&docs, n_remove, config.control_seed)?;
    let output = args
        .output
        .unwrap_or_else(|| config.out_dir.join("control.jsonl"));
    if let Some(parent) = output.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    let stats = corpus::write_corpus(control, &output)?;
    println!(
        "control partition: removed {n_remove} of {} docs, kept {}",
        docs.len(),
        stats.doc_count
    );
    Ok(())
}

fn score(args: ScoreArgs) -> Result<(), CliError> {
    let unit: TrigramUnit = args.trigram_unit.parse().map_err(CliError::Usage)?;
    let docs = corpus::collect_corpus(&args.input, CorpusFormat::Jsonl)?;
    let rows: Vec<MetricRow> = docs
        .iter()
        .map(|doc| MetricRow {
            doc_id: doc.id.clone(),
            metrics: compute_metrics(doc, unit),
        })
        .collect();
    let scores = match &args.bounds {
        Some(path) => {
            let matrix: Vec<[f64; 7]> = rows.iter().map(|r| r.metrics.values()).collect();
            let bounds = tables::load_bounds(path, NormBounds::observed(&matrix))?;
            family_scores_with_bounds(&rows, &bounds)
        }
        None => family_scores(&rows),
    };
    write_metrics_csv(&args.output, &rows, &scores)?;
    println!("scored {} documents -> {}", rows.len(), args.output.display());
    Ok(())
}

fn threshold(args: ThresholdArgs) -> Result<(), CliError> {
    let mut sides: BTreeMap<wikiclean::heuristics::Family, SideSpec> =
        FAMILIES.iter().map(|&f| (f, SideSpec::Low)).collect();
    for entry in &args.side {
        let (family, side) = parse_side(entry)?;
        sides.insert(family, side);
    }
    let (rows, scores) = read_metrics_csv(&args.metrics)?;
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    if args.per_metric {
        for family in FAMILIES {
            for &idx in family.metric_indices() {
                let values = rows.iter().map(|r| r.metrics.values()[idx]).collect();
                columns.push((METRIC_NAMES[idx].to_string(), values));
            }
        }
    } else {
        for family in FAMILIES {
            let values = scores.iter().map(|s| s.get(family)).collect();
            columns.push((family.name().to_string(), values));
        }
    }
    let mut thresholds: Vec<Threshold> = Vec::new();
    for (name, values) in &columns {
        let family = family_of_column(name)?;
        for &side in sides[&family].sides() {
            match select_threshold(name, values, side, args.frac, args.seed) {
                Ok(t) => {
                    println!("threshold {} ({:?}): {:.6}", t.name, t.side, t.cut);
                    thresholds.push(t);
                }
                Err(ThresholdError::Degenerate) if args.skip_degenerate => {
                    eprintln!("warning: {name}: degenerate distribution, skipped");
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let json = serde_json::to_string_pretty(&thresholds)
        .map_err(|e| CliError::data(e.to_string()))?;
    std::fs::write(&args.output, json)
        .map_err(|e| CliError::data(format!("{}: {e}", args.output.display())))?;
    Ok(())
}

fn family_of_column(name: &str) -> Result<wikiclean::heuristics::Family, CliError> {
    if let Ok(family) = name.parse() {
        return Ok(family);
    }
    let idx = METRIC_NAMES
        .iter()
        .position(|m| *m == name)
        .ok_or_else(|| CliError::Usage(format!("unknown column {name}")))?;
    Ok(FAMILIES
        .into_iter()
        .find(|f| f.metric_indices().contains(&idx))
        .expect("every metric belongs to a family"))
}

fn tier(args: TierArgs) -> Result<(), CliError> {
    let mut points = tables::load_retention(&args.retention)?;
    if args.unweighted {
        for p in &mut points {
            p.weight = 1;
        }
    }
    let assignment = tier_cluster(&points, args.seed, args.restarts)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::data(format!("{}: {e}", args.out_dir.display())))?;

    let path = args.out_dir.join("tiers.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    w.write_record(["wiki", "frac_docs_retained", "frac_chars_retained", "weight", "tier"])
        .map_err(CliError::data)?;
    for p in &points {
        w.write_record([
            p.wiki.as_str(),
            &format!("{:.6}", p.frac_docs_retained),
            &format!("{:.6}", p.frac_chars_retained),
            &p.weight.to_string(),
            &assignment.tiers[&p.wiki].to_string(),
        ])
        .map_err(CliError::data)?;
    }
    w.flush().map_err(CliError::data)?;

    let path = args.out_dir.join("centroids.csv");
    let mut w = csv::Writer::from_path(&path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    w.write_record(["tier", "frac_docs_retained", "frac_chars_retained"])
        .map_err(CliError::data)?;
    for (i, c) in assignment.centroids.iter().enumerate() {
        w.write_record([&(i + 1).to_string(), &format!("{:.6}", c[0]), &format!("{:.6}", c[1])])
            .map_err(CliError::data)?;
    }
    w.flush().map_err(CliError::data)?;
    println!("assigned {} wikis to 4 tiers -> {}", points.len(), args.out_dir.display());
    Ok(())
}

fn depth(args: DepthArgs) -> Result<(), CliError> {
    let stats = tables::load_edit_stats(&args.stats)?;
    let values = report::write_depth_csv(&args.output, &stats)?;
    println!("computed Depth+ for {} wikis -> {}", values.len(), args.output.display());
    Ok(())
}

/// Loads `(wiki, manifest)` pairs plus any metric tables sitting next to
/// the manifests.
type Runs = (Vec<(String, Manifest)>, Vec<(String, PathBuf)>);

fn load_runs(dir: Option<&Path>, runs: &[String]) -> Result<Runs, CliError> {
    let mut manifests = Vec::new();
    let mut tables = Vec::new();
    let mut add = |wiki: String, run_dir: &Path| -> Result<(), CliError> {
        let manifest = Manifest::load(&run_dir.join("manifest.json"))?;
        let metrics = run_dir.join("metrics.csv");
        if metrics.exists() {
            tables.push((wiki.clone(), metrics));
        }
        manifests.push((wiki, manifest));
        Ok(())
    };
    if let Some(dir) = dir {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
        let mut subdirs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("manifest.json").exists())
            .collect();
        subdirs.sort();
        for sub in subdirs {
            let wiki = sub
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            add(wiki, &sub)?;
        }
    }
    for entry in runs {
        let (wiki, path) = entry.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--run expects wiki=dir, got {entry}"))
        })?;
        add(wiki.to_string(), Path::new(path))?;
    }
    if manifests.is_empty() {
        return Err(CliError::Usage(
            "no runs supplied; use --dir or --run wiki=dir".into(),
        ));
    }
    Ok((manifests, tables))
}

fn correlate(args: CorrelateArgs) -> Result<(), CliError> {
    let (manifests, _) = load_runs(args.dir.as_deref(), &args.run)?;
    let completed: Vec<(String, Vec<wikiclean::corpus::StageDelta>)> = manifests
        .iter()
        .filter(|(_, m)| m.completed)
        .map(|(w, m)| (w.clone(), m.stages.clone()))
        .collect();
    let points = wikiclean::analysis::retention_table(&completed)?;
    let mut records: Vec<report::CorrelationRecord> = Vec::new();

    if let Some(path) = &args.edit_stats {
        let stats = tables::load_edit_stats(path)?;
        let depth: BTreeMap<&str, f64> = stats
            .iter()
            .map(|(w, s)| Ok((w.as_str(), wikiclean::analysis::depth_plus(s)?)))
            .collect::<Result<_, CliError>>()?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for p in &points {
            if let Some(&d) = depth.get(p.wiki.as_str()) {
                xs.push(p.frac_docs_retained);
                ys.push(d);
            }
        }
        let (rho, p) = wikiclean::analysis::spearman(&xs, &ys)?;
        records.push(report::CorrelationRecord {
            pair: "retention_docs_vs_depth_plus".into(),
            rho,
            p,
            n: xs.len(),
        });
    }
    if let Some(path) = &args.bots {
        let ratios = tables::load_bot_ratios(path)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (wiki, manifest) in &manifests {
            if let (Some(stage), Some(&ratio)) =
                (manifest.stage(STAGE_MINHASH), ratios.get(wiki))
            {
                xs.push(1.0 - stage.frac_docs_retained());
                ys.push(ratio);
            }
        }
        let (rho, p) = wikiclean::analysis::spearman(&xs, &ys)?;
        records.push(report::CorrelationRecord {
            pair: "minhash_removed_vs_bot_ratio".into(),
            rho,
            p,
            n: xs.len(),
        });
    }
    if records.is_empty() {
        return Err(CliError::Usage(
            "nothing to correlate; supply --edit-stats and/or --bots".into(),
        ));
    }
    let json = serde_json::to_string_pretty(&records).map_err(CliError::data)?;
    std::fs::write(&args.output, json)
        .map_err(|e| CliError::data(format!("{}: {e}", args.output.display())))?;
    for r in &records {
        println!("{}: rho = {:.4}, p = {:.2e}, n = {}", r.pair, r.rho, r.p, r.n);
    }
    Ok(())
}

fn report_cmd(args: ReportArgs) -> Result<(), CliError> {
    let (manifests, metric_tables) = load_runs(args.dir.as_deref(), &args.run)?;
    let bots = args.bots.as_deref().map(tables::load_bot_ratios).transpose()?;
    let stats = args
        .edit_stats
        .as_deref()
        .map(tables::load_edit_stats)
        .transpose()?;
    let options = report::ReportOptions {
        svg: args.svg,
        seed: args.seed,
        restarts: args.restarts,
    };
    let summary = report::report(
        &args.out_dir,
        &manifests,
        &metric_tables,
        bots.as_ref(),
        stats.as_deref(),
        &options,
    )?;
    println!("report for {} wikis -> {}", summary.wikis, args.out_dir.display());
    for note in &summary.notes {
        println!("note: {note}");
    }
    Ok(())
}

fn run_all(args: ConfigArgs) -> Result<(), CliError> {
    let config = args.resolve()?;
    let summary = pipeline::run_all(&config)?;
    print_stages(&summary.manifest);
    warn_skipped(&summary.manifest);
    println!(
        "primary {} docs, heuristic {} docs, control {} docs -> {}",
        summary.primary_docs,
        summary.heuristic_docs,
        summary.control_docs,
        config.out_dir.display()
    );
    Ok(())
}
