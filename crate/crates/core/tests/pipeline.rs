//! Pipeline integration: stage composition, determinism, identity and
//! failure cases.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wikiclean::corpus::Document;
use wikiclean::pipeline::{
    self, Manifest, PipelineConfig, STAGE_EXACT, STAGE_HEURISTIC, STAGE_MINHASH, STAGE_SCRIPT,
};

fn doc(id: &str, text: &str) -> Document {
    Document {
        id: id.to_string(),
        title: format!("T {id}"),
        text: text.to_string(),
        lang: "yo".into(),
    }
}

/// Distinct single-script documents with healthy, varied metrics.
fn clean_corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let words: Vec<String> = (0..rng.gen_range(60..160))
                .map(|_| format!("oro{}", rng.gen_range(0..500)))
                .collect();
            doc(&format!("c{i}"), &words.join(" "))
        })
        .collect()
}

fn write_jsonl(path: &Path, docs: &[Document]) {
    wikiclean::corpus::write_corpus(docs.iter().cloned(), path).unwrap();
}

fn config_for(dir: &Path, input: &Path) -> PipelineConfig {
    PipelineConfig {
        input: input.to_path_buf(),
        out_dir: dir.to_path_buf(),
        lang: Some("yo".into()),
        ..PipelineConfig::default()
    }
}

#[test]
fn noop_corpus_passes_primary_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let docs = clean_corpus(80, 1);
    write_jsonl(&input, &docs);
    let config = config_for(&dir.path().join("out"), &input);
    let outcome = pipeline::run_primary(&config).unwrap();

    assert_eq!(outcome.corpus, docs, "output identical to input");
    assert_eq!(outcome.manifest.stages.len(), 3);
    for stage in &outcome.manifest.stages {
        assert_eq!(stage.docs_before, stage.docs_after, "{}", stage.stage_name);
        assert_eq!(stage.chars_before, stage.chars_after);
    }
}

#[test]
fn primary_then_heuristic_equals_run_all() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let mut docs = clean_corpus(150, 2);
    docs.push(doc("dup0", &docs[0].text.clone()));
    docs.push(doc("junk0", &"ami ".repeat(40)));
    write_jsonl(&input, &docs);

    // Two-step invocation.
    let out_a = dir.path().join("stepwise");
    let config_a = config_for(&out_a, &input);
    let primary = pipeline::run_primary(&config_a).unwrap();
    let mut manifest = primary.manifest;
    pipeline::run_heuristic(&config_a, primary.corpus, &mut manifest).unwrap();

    // Single combined invocation.
    let out_b = dir.path().join("combined");
    let config_b = config_for(&out_b, &input);
    pipeline::run_all(&config_b).unwrap();

    for file in ["primary.jsonl", "heuristic.jsonl", "metrics.csv", "thresholds.json"] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between stepwise and combined runs");
    }
}

#[test]
fn outputs_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let mut docs = clean_corpus(200, 3);
    for i in 0..20 {
        docs.push(doc(&format!("d{i}"), &docs[i].text.clone()));
    }
    for i in 0..10 {
        let longer = format!("{} afikun meji", docs[i].text);
        docs.push(doc(&format!("n{i}"), &longer));
    }
    write_jsonl(&input, &docs);

    let run_with_pool = |threads: usize, out: &Path| {
        let config = config_for(out, &input);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| pipeline::run_all(&config)).unwrap();
    };
    let out1 = dir.path().join("one");
    let out4 = dir.path().join("four");
    run_with_pool(1, &out1);
    run_with_pool(4, &out4);

    for file in [
        "primary.jsonl",
        "heuristic.jsonl",
        "control.jsonl",
        "metrics.csv",
        "thresholds.json",
        "verdicts_exact.jsonl",
        "verdicts_minhash.jsonl",
    ] {
        let a = std::fs::read(out1.join(file)).unwrap();
        let b = std::fs::read(out4.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs across worker counts");
    }
}

#[test]
fn degenerate_metric_distribution_fails_with_code_3() {
    // Every document is a different shuffle of the same 30 distinct words:
    // identical length, identical unique counts, identical entropies, but
    // distinct texts that survive deduplication.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base: Vec<String> = (0..30).map(|i| format!("odidi{i:02}")).collect();
    let docs: Vec<Document> = (0..50)
        .map(|i| {
            let mut words = base.clone();
            // Fisher-Yates with the seeded generator.
            for k in (1..words.len()).rev() {
                words.swap(k, rng.gen_range(0..=k));
            }
            doc(&format!("p{i}"), &words.join(" "))
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_jsonl(&input, &docs);
    let config = config_for(&dir.path().join("out"), &input);

    let err = pipeline::run_all(&config).unwrap_err();
    assert!(err.is_degenerate(), "expected degenerate error, got {err}");
    assert_eq!(err.exit_code(), 3);

    // The failed run is flagged in the manifest.
    let manifest = Manifest::load(&dir.path().join("out/manifest.json")).unwrap();
    assert!(!manifest.completed);
    assert_eq!(manifest.failed_stage.as_deref(), Some(STAGE_HEURISTIC));

    // With skip_degenerate the run completes and prunes nothing.
    let mut lenient = config_for(&dir.path().join("out2"), &input);
    lenient.skip_degenerate = true;
    let summary = pipeline::run_all(&lenient).unwrap();
    assert_eq!(summary.heuristic_docs, 50);
    assert_eq!(summary.manifest.skipped_families.len(), 3);
}

#[test]
fn thresholds_disabled_passes_everything_through() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let mut docs = clean_corpus(60, 4);
    docs.push(doc("junk", &"kan ".repeat(30)));
    write_jsonl(&input, &docs);
    let mut config = config_for(&dir.path().join("out"), &input);
    config.thresholds_enabled = false;

    let summary = pipeline::run_all(&config).unwrap();
    let heuristic = summary.manifest.stage(STAGE_HEURISTIC).unwrap();
    assert_eq!(heuristic.docs_before, heuristic.docs_after);
    assert_eq!(summary.manifest.thresholds.len(), 0);
}

#[test]
fn template_stamped_corpus_collapses_in_minhash() {
    // A wiki where 80% of articles are stamped from one template, each
    // differing only in a one-word "subject": the MinHash stage must
    // remove the whole template cluster and keep the organic articles.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let template: Vec<String> = (0..120).map(|i| format!("papa{i}")).collect();
    let mut docs = Vec::new();
    for i in 0..160 {
        let mut words = template.clone();
        words[0] = format!("koko{i}");
        docs.push(doc(&format!("bot{i}"), &words.join(" ")));
    }
    for i in 0..40 {
        let words: Vec<String> = (0..rng.gen_range(60..140))
            .map(|_| format!("eda{}", rng.gen_range(0..900)))
            .collect();
        docs.push(doc(&format!("org{i}"), &words.join(" ")));
    }
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_jsonl(&input, &docs);
    let config = config_for(&dir.path().join("out"), &input);
    let outcome = pipeline::run_primary(&config).unwrap();

    let minhash = outcome.manifest.stage(STAGE_MINHASH).unwrap();
    assert_eq!(minhash.docs_before - minhash.docs_after, 159, "one template survivor");
    let kept: Vec<&str> = outcome.corpus.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(kept.iter().filter(|id| id.starts_with("org")).count(), 40);
    assert_eq!(kept.iter().filter(|id| id.starts_with("bot")).count(), 1);
    assert_eq!(kept[0], "bot0", "earliest template article represents the cluster");
}

#[test]
fn custom_registry_overrides_builtin_entry() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    // Cyrillic text under a code the built-in table maps to Latin.
    let docs = vec![doc("1", "селени текст овде"), doc("2", "ilu gidi")];
    write_jsonl(&input, &docs);
    let registry = dir.path().join("registry.txt");
    std::fs::write(&registry, "yo: Cyrillic\n").unwrap();

    let mut config = config_for(&dir.path().join("out"), &input);
    config.registry = Some(registry);
    let outcome = pipeline::run_primary(&config).unwrap();
    let kept: Vec<&str> = outcome.corpus.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(kept, ["1"], "override flips which script survives");
}

#[test]
fn random_control_is_seeded_and_bounded() {
    let docs = clean_corpus(100, 5);
    let a = pipeline::run_random_control(&docs, 10, 42).unwrap();
    let b = pipeline::run_random_control(&docs, 10, 42).unwrap();
    assert_eq!(a, b, "fixed seed gives identical removal set");
    let c = pipeline::run_random_control(&docs, 10, 43).unwrap();
    assert_ne!(a, c, "different seed moves the removal set");

    assert_eq!(pipeline::run_random_control(&docs, 0, 1).unwrap(), docs);
    assert!(pipeline::run_random_control(&docs, 100, 1).unwrap().is_empty());
    assert!(pipeline::run_random_control(&docs, 101, 1).is_err());
}

#[test]
fn control_partition_preserves_input_order() {
    let docs = clean_corpus(50, 6);
    let control = pipeline::run_random_control(&docs, 20, 7).unwrap();
    let mut last_seen = 0;
    for doc in &control {
        let idx: usize = doc.id[1..].parse().unwrap();
        assert!(idx >= last_seen, "order disturbed at {idx}");
        last_seen = idx;
    }
}

#[test]
fn stage_order_recorded_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_jsonl(&input, &clean_corpus(40, 7));
    let config = config_for(&dir.path().join("out"), &input);
    let summary = pipeline::run_all(&config).unwrap();
    let names: Vec<&str> = summary
        .manifest
        .stages
        .iter()
        .map(|s| s.stage_name.as_str())
        .collect();
    assert_eq!(names, [STAGE_SCRIPT, STAGE_EXACT, STAGE_MINHASH, STAGE_HEURISTIC]);
}

#[test]
fn duplicate_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let docs = vec![doc("dup", "alpha beta"), doc("dup", "gamma delta")];
    write_jsonl(&input, &docs);
    let config = config_for(&dir.path().join("out"), &input);
    let err = pipeline::run_primary(&config).unwrap_err();
    assert!(err.to_string().contains("duplicate document id"));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn length_and_diversity_metrics_corentee_on_synthetic_docs() {
    // The absolute metrics are expected to move together across documents
    // of varying length (the reason they form one family).
    let docs = clean_corpus(150, 8);
    let rows: Vec<_> = docs
        .iter()
        .map(|d| wikiclean::heuristics::compute_metrics(d, wikiclean::heuristics::TrigramUnit::Words))
        .collect();
    let lengths: Vec<f64> = rows.iter().map(|m| m.length as f64).collect();
    let words: Vec<f64> = rows.iter().map(|m| m.unique_words as f64).collect();
    let trigrams: Vec<f64> = rows.iter().map(|m| m.unique_trigrams as f64).collect();
    let (rho_lw, _) = wikiclean::analysis::spearman(&lengths, &words).unwrap();
    let (rho_lt, _) = wikiclean::analysis::spearman(&lengths, &trigrams).unwrap();
    let (rho_wt, _) = wikiclean::analysis::spearman(&words, &trigrams).unwrap();
    assert!(rho_lw > 0.9 && rho_lt > 0.9 && rho_wt > 0.9, "{rho_lw} {rho_lt} {rho_wt}");
}
