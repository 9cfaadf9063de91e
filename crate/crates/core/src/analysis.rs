//! Corpus-level quality analytics: k-means retention tiers, the Depth+
//! collaboration proxy, and Spearman correlation studies.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::corpus::StageDelta;
use crate::pipeline::{STAGE_EXACT, STAGE_MINHASH, STAGE_SCRIPT};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("need at least {needed} distinct points for k-means, got {got}")]
    TooFewDistinct { needed: usize, got: usize },
    #[error("input vectors must have equal length >= 3")]
    BadVectors,
    #[error("correlation undefined for constant input")]
    ConstantInput,
    #[error("undefined Depth+: {reason}")]
    UndefinedDepth { reason: String },
    #[error("wiki {wiki}: missing stage {stage} in manifest")]
    IncompleteManifest { wiki: String, stage: String },
    #[error("wiki {wiki}: empty unfiltered corpus")]
    EmptyWiki { wiki: String },
    #[error("inconsistent edit stats: {0}")]
    BadEditStats(String),
}

/// One wiki's survival through the full primary filtering stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionPoint {
    pub wiki: String,
    pub frac_docs_retained: f64,
    pub frac_chars_retained: f64,
    /// Unfiltered article count; the clustering weight.
    pub weight: u64,
}

/// Tier labels per wiki plus the four cluster centroids in retention space.
/// Tier 1 retains the most, tier 4 the least.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierAssignment {
    pub tiers: BTreeMap<String, u8>,
    /// Centroid per tier, index 0 = tier 1; `[frac_docs, frac_chars]`.
    pub centroids: [[f64; 2]; 4],
}

pub const TIER_COUNT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Weighted k-means with k-means++ seeding; best of `restarts` runs by
/// weighted inertia. Deterministic for a fixed seed: restart r uses
/// `seed + r`, and ties in assignment go to the lowest centroid index.
pub fn weighted_kmeans(
    points: &[[f64; 2]],
    weights: &[f64],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult, AnalysisError> {
    assert_eq!(points.len(), weights.len(), "one weight per point");
    if points.len() < k {
        return Err(AnalysisError::TooFewPoints {
            needed: k,
            got: points.len(),
        });
    }
    let mut distinct: Vec<[f64; 2]> = points.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < k {
        return Err(AnalysisError::TooFewDistinct {
            needed: k,
            got: distinct.len(),
        });
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..restarts.max(1) {
        let result = kmeans_once(points, weights, k, seed.wrapping_add(restart as u64));
        if best.as_ref().is_none_or(|b| result.inertia < b.inertia) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn kmeans_once(points: &[[f64; 2]], weights: &[f64], k: usize, seed: u64) -> KMeansResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, weights, k, &mut rng);
    let mut labels = vec![0usize; points.len()];
    for _ in 0..200 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let nearest = nearest_centroid(*p, &centroids);
            if labels[i] != nearest {
                labels[i] = nearest;
                changed = true;
            }
        }
        let mut sums = vec![[0.0f64; 2]; k];
        let mut mass = vec![0.0f64; k];
        for (i, p) in points.iter().enumerate() {
            let w = weights[i];
            sums[labels[i]][0] += w * p[0];
            sums[labels[i]][1] += w * p[1];
            mass[labels[i]] += w;
        }
        for c in 0..k {
            if mass[c] > 0.0 {
                centroids[c] = [sums[c][0] / mass[c], sums[c][1] / mass[c]];
            } else {
                // Re-seed an emptied cluster at the point farthest from its
                // current centroid (weighted), keeping the run deterministic.
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|(i, a), (j, b)| {
                        let da = weights[*i] * dist2(**a, centroids[labels[*i]]);
                        let db = weights[*j] * dist2(**b, centroids[labels[*j]]);
                        da.partial_cmp(&db).unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centroids[c] = points[far];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points
        .iter()
        .enumerate()
        .map(|(i, p)| weights[i] * dist2(*p, centroids[labels[i]]))
        .sum();
    KMeansResult {
        centroids,
        labels,
        inertia,
    }
}

fn nearest_centroid(p: [f64; 2], centroids: &[[f64; 2]]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(p, *centroid);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// k-means++: first centroid drawn with probability proportional to weight,
/// later ones proportional to `weight * D(x)^2`.
fn plus_plus_init(
    points: &[[f64; 2]],
    weights: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<[f64; 2]> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[weighted_draw(weights, rng)]);
    while centroids.len() < k {
        let scores: Vec<f64> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = centroids
                    .iter()
                    .map(|c| dist2(*p, *c))
                    .fold(f64::INFINITY, f64::min);
                weights[i] * d
            })
            .collect();
        let total: f64 = scores.iter().sum();
        let idx = if total > 0.0 {
            weighted_draw(&scores, rng)
        } else {
            // All remaining mass sits on the chosen centroids; any point does.
            weighted_draw(weights, rng)
        };
        centroids.push(points[idx]);
    }
    centroids
}

fn weighted_draw(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen_range(0.0..1.0) * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Clusters wikis into four quality tiers by their primary-filter retention.
///
/// Features are z-scored before clustering (the two retention fractions
/// have different spreads), each wiki weighted by its unfiltered article
/// count. Points are processed in wiki-code order, so the labeling is
/// independent of caller ordering. Clusters map to tiers by descending
/// centroid retention sum.
pub fn tier_cluster(
    points: &[RetentionPoint],
    seed: u64,
    restarts: usize,
) -> Result<TierAssignment, AnalysisError> {
    let mut sorted: Vec<&RetentionPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.wiki.cmp(&b.wiki));
    let raw: Vec<[f64; 2]> = sorted
        .iter()
        .map(|p| [p.frac_docs_retained, p.frac_chars_retained])
        .collect();
    let weights: Vec<f64> = sorted.iter().map(|p| p.weight as f64).collect();

    let (standardized, means, stds) = standardize(&raw);
    let result = weighted_kmeans(&standardized, &weights, TIER_COUNT, seed, restarts)?;

    // Rank clusters by destandardized retention sum, highest first.
    let mut order: Vec<usize> = (0..TIER_COUNT).collect();
    let destd = |c: [f64; 2]| -> [f64; 2] {
        [c[0] * stds[0] + means[0], c[1] * stds[1] + means[1]]
    };
    order.sort_by(|&a, &b| {
        let ca = destd(result.centroids[a]);
        let cb = destd(result.centroids[b]);
        (cb[0] + cb[1]).partial_cmp(&(ca[0] + ca[1])).unwrap()
    });
    let mut tier_of_cluster = [0u8; TIER_COUNT];
    let mut centroids = [[0.0f64; 2]; TIER_COUNT];
    for (rank, &cluster) in order.iter().enumerate() {
        tier_of_cluster[cluster] = rank as u8 + 1;
        centroids[rank] = destd(result.centroids[cluster]);
    }
    let tiers = sorted
        .iter()
        .zip(&result.labels)
        .map(|(p, &label)| (p.wiki.clone(), tier_of_cluster[label]))
        .collect();
    Ok(TierAssignment { tiers, centroids })
}

fn standardize(points: &[[f64; 2]]) -> (Vec<[f64; 2]>, [f64; 2], [f64; 2]) {
    let n = points.len() as f64;
    let mut means = [0.0f64; 2];
    for p in points {
        means[0] += p[0];
        means[1] += p[1];
    }
    means[0] /= n;
    means[1] /= n;
    let mut vars = [0.0f64; 2];
    for p in points {
        vars[0] += (p[0] - means[0]).powi(2);
        vars[1] += (p[1] - means[1]).powi(2);
    }
    let stds = [
        (vars[0] / n).sqrt().max(f64::MIN_POSITIVE),
        (vars[1] / n).sqrt().max(f64::MIN_POSITIVE),
    ];
    let standardized = points
        .iter()
        .map(|p| [(p[0] - means[0]) / stds[0], (p[1] - means[1]) / stds[1]])
        .collect();
    (standardized, means, stds)
}

/// Wikimedia activity counts behind the Depth+ formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiEditStats {
    pub editors: u64,
    pub edits: u64,
    pub total_pages: u64,
    pub articles: u64,
    pub non_articles: u64,
}

impl WikiEditStats {
    /// Checks `non_articles = total_pages - articles` on externally loaded
    /// rows.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.articles + self.non_articles != self.total_pages {
            return Err(AnalysisError::BadEditStats(format!(
                "articles ({}) + non_articles ({}) != total_pages ({})",
                self.articles, self.non_articles, self.total_pages
            )));
        }
        Ok(())
    }
}

/// `Depth+ = editors * (edits / total_pages) * (articles / non_articles)`.
pub fn depth_plus(s: &WikiEditStats) -> Result<f64, AnalysisError> {
    if s.total_pages == 0 {
        return Err(AnalysisError::UndefinedDepth {
            reason: "total_pages is 0".into(),
        });
    }
    if s.non_articles == 0 {
        return Err(AnalysisError::UndefinedDepth {
            reason: "non_articles is 0".into(),
        });
    }
    Ok(s.editors as f64 * (s.edits as f64 / s.total_pages as f64)
        * (s.articles as f64 / s.non_articles as f64))
}

/// Spearman rank correlation with average ranks for ties, plus a two-sided
/// p-value from the t approximation on `n - 2` degrees of freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64), AnalysisError> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(AnalysisError::BadVectors);
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson(&rx, &ry)?;
    let n = x.len() as f64;
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * ((n - 2.0) / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, n - 2.0).expect("valid dof");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok((rho, p))
}

/// Ranks 1..n with tied runs receiving their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the same value; average their 1-based ranks.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(AnalysisError::ConstantInput);
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Builds per-wiki retention points from primary-filter manifests.
///
/// Fractions compose across the three primary stages: survivors of the
/// whole stage sequence over the unfiltered counts. The weight is the
/// unfiltered article count.
pub fn retention_table(
    manifests: &[(String, Vec<StageDelta>)],
) -> Result<Vec<RetentionPoint>, AnalysisError> {
    let mut points = Vec::with_capacity(manifests.len());
    for (wiki, stages) in manifests {
        let find = |name: &str| -> Result<&StageDelta, AnalysisError> {
            stages.iter().find(|s| s.stage_name == name).ok_or_else(|| {
                AnalysisError::IncompleteManifest {
                    wiki: wiki.clone(),
                    stage: name.to_string(),
                }
            })
        };
        let script = find(STAGE_SCRIPT)?;
        find(STAGE_EXACT)?;
        let minhash = find(STAGE_MINHASH)?;
        if script.docs_before == 0 {
            return Err(AnalysisError::EmptyWiki { wiki: wiki.clone() });
        }
        points.push(RetentionPoint {
            wiki: wiki.clone(),
            frac_docs_retained: minhash.docs_after as f64 / script.docs_before as f64,
            frac_chars_retained: if script.chars_before == 0 {
                1.0
            } else {
                minhash.chars_after as f64 / script.chars_before as f64
            },
            weight: script.docs_before,
        })
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusStats;

    fn stats(editors: u64, edits: u64, total: u64, articles: u64, non: u64) -> WikiEditStats {
        WikiEditStats {
            editors,
            edits,
            total_pages: total,
            articles,
            non_articles: non,
        }
    }

    #[test]
    fn depth_plus_arithmetic() {
        // 10 * (100/200) * (50/25) = 10
        let v = depth_plus(&stats(10, 100, 200, 50, 25)).unwrap();
        assert_eq!(v, 10.0);
    }

    #[test]
    fn depth_plus_zero_edits_is_zero() {
        assert_eq!(depth_plus(&stats(10, 0, 200, 50, 25)).unwrap(), 0.0);
    }

    #[test]
    fn depth_plus_reduces_to_editors() {
        // articles = non_articles and edits = total -> value = editors
        let v = depth_plus(&stats(37, 500, 500, 40, 40)).unwrap();
        assert_eq!(v, 37.0);
    }

    #[test]
    fn depth_plus_undefined_cases() {
        assert!(depth_plus(&stats(1, 1, 0, 0, 0)).is_err());
        assert!(depth_plus(&stats(1, 1, 10, 10, 0)).is_err());
    }

    #[test]
    fn depth_plus_homogeneous_in_editors() {
        let base = stats(21, 913, 1700, 600, 1100);
        let doubled = stats(42, 913, 1700, 600, 1100);
        assert_eq!(
            2.0 * depth_plus(&base).unwrap(),
            depth_plus(&doubled).unwrap()
        );
    }

    #[test]
    fn edit_stats_consistency_check() {
        assert!(stats(1, 1, 100, 60, 40).validate().is_ok());
        assert!(stats(1, 1, 100, 60, 39).validate().is_err());
    }

    #[test]
    fn spearman_monotone_is_one() {
        let x = [1.0, 2.0, 5.0, 9.0, 11.0];
        let y = [2.0, 4.0, 25.0, 81.0, 121.0];
        let (rho, p) = spearman(&x, &y).unwrap();
        assert_eq!(rho, 1.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn spearman_reversed_is_minus_one() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [4.0, 3.0, 2.0, 1.0];
        let (rho, _) = spearman(&x, &y).unwrap();
        assert_eq!(rho, -1.0);
    }

    #[test]
    fn spearman_constant_input_errors() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn average_ranks_handle_ties() {
        // values 10, 20, 20, 30 -> ranks 1, 2.5, 2.5, 4
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn spearman_matches_rank_then_pearson_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..100 {
            let n = rng.gen_range(5..60);
            // Coarse values force ties.
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..10) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..10) as f64).collect();
            let ours = spearman(&x, &y);
            let oracle = pearson(&average_ranks(&x), &average_ranks(&y));
            match (ours, oracle) {
                (Ok((rho, _)), Ok(expected)) => {
                    assert!((rho - expected).abs() < 1e-12)
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("impl {a:?} vs oracle {b:?}"),
            }
        }
    }

    #[test]
    fn spearman_invariant_under_monotone_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..40).map(|_| rng.gen_range(0.1..9.0)).collect();
        let y: Vec<f64> = (0..40).map(|_| rng.gen_range(0.1..9.0)).collect();
        let (rho, p) = spearman(&x, &y).unwrap();
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let gy: Vec<f64> = y.iter().map(|v| 3.0 * v.ln() + 7.0).collect();
        let (rho2, p2) = spearman(&fx, &gy).unwrap();
        assert!((rho - rho2).abs() < 1e-12);
        assert!((p - p2).abs() < 1e-12);
    }

    #[test]
    fn four_separated_blobs_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let centers = [[0.95, 0.97], [0.75, 0.80], [0.45, 0.55], [0.10, 0.20]];
        let mut points = Vec::new();
        for (b, c) in centers.iter().enumerate() {
            for i in 0..25 {
                points.push(RetentionPoint {
                    wiki: format!("w{b}_{i:02}"),
                    frac_docs_retained: c[0] + rng.gen_range(-0.01..0.01),
                    frac_chars_retained: c[1] + rng.gen_range(-0.01..0.01),
                    weight: rng.gen_range(100..10_000),
                });
            }
        }
        let assignment = tier_cluster(&points, 11, 10).unwrap();
        // Blob b (ordered by retention) must map wholesale to tier b+1.
        for p in &points {
            let blob: usize = p.wiki[1..2].parse().unwrap();
            assert_eq!(assignment.tiers[&p.wiki], blob as u8 + 1, "wiki {}", p.wiki);
        }
        // Brute-force nearest-centroid check on the destandardized space is
        // implied: every blob member shares a tier, and tier centroids sit
        // within the blob's spread.
        for (b, c) in centers.iter().enumerate() {
            let got = assignment.centroids[b];
            assert!((got[0] - c[0]).abs() < 0.02 && (got[1] - c[1]).abs() < 0.02);
        }
    }

    #[test]
    fn equal_weights_match_unweighted_kmeans() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let points: Vec<[f64; 2]> = (0..60)
            .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let w1 = vec![1.0; points.len()];
        let w7 = vec![7.0; points.len()];
        let a = weighted_kmeans(&points, &w1, 4, 99, 5).unwrap();
        let b = weighted_kmeans(&points, &w7, 4, 99, 5).unwrap();
        assert_eq!(a.labels, b.labels);
        for (ca, cb) in a.centroids.iter().zip(&b.centroids) {
            assert!((ca[0] - cb[0]).abs() < 1e-9 && (ca[1] - cb[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn heavy_point_pins_its_centroid() {
        let mut points = vec![[0.9, 0.9], [0.1, 0.1], [0.12, 0.09], [0.5, 0.5], [0.52, 0.48]];
        let mut weights = vec![1_000_000.0, 1.0, 1.0, 1.0, 1.0];
        // Pad with distinct light points so k=4 has enough diversity.
        points.push([0.3, 0.7]);
        weights.push(1.0);
        let result = weighted_kmeans(&points, &weights, 4, 2, 10).unwrap();
        let heavy_label = result.labels[0];
        let c = result.centroids[heavy_label];
        assert!((c[0] - 0.9).abs() < 1e-3 && (c[1] - 0.9).abs() < 1e-3);
    }

    #[test]
    fn tier_labels_ignore_input_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let points: Vec<RetentionPoint> = (0..40)
            .map(|i| RetentionPoint {
                wiki: format!("wiki{i:02}"),
                frac_docs_retained: rng.gen_range(0.0..1.0),
                frac_chars_retained: rng.gen_range(0.0..1.0),
                weight: rng.gen_range(1..1000),
            })
            .collect();
        let a = tier_cluster(&points, 21, 10).unwrap();
        let mut shuffled = points.clone();
        shuffled.reverse();
        shuffled.swap(0, 17);
        let b = tier_cluster(&shuffled, 21, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_distinct_points_rejected() {
        let p = RetentionPoint {
            wiki: "a".into(),
            frac_docs_retained: 0.5,
            frac_chars_retained: 0.5,
            weight: 10,
        };
        let points: Vec<RetentionPoint> = (0..6)
            .map(|i| RetentionPoint {
                wiki: format!("w{i}"),
                ..p.clone()
            })
            .collect();
        assert!(matches!(
            tier_cluster(&points, 1, 3),
            Err(AnalysisError::TooFewDistinct { .. })
        ));
    }

    #[test]
    fn retention_composes_across_stages() {
        let delta = |name: &str, db: u64, da: u64| {
            StageDelta::new(
                name,
                CorpusStats { doc_count: db, char_count: db * 100 },
                CorpusStats { doc_count: da, char_count: da * 100 },
            )
        };
        let manifests = vec![(
            "yo".to_string(),
            vec![
                delta(STAGE_SCRIPT, 1000, 800),
                delta(STAGE_EXACT, 800, 600),
                delta(STAGE_MINHASH, 600, 400),
            ],
        )];
        let points = retention_table(&manifests).unwrap();
        assert!((points[0].frac_docs_retained - 0.4).abs() < 1e-12);
        assert_eq!(points[0].weight, 1000);
    }

    #[test]
    fn noop_stages_give_full_retention() {
        let s = CorpusStats { doc_count: 10, char_count: 1000 };
        let manifests = vec![(
            "yo".to_string(),
            vec![
                StageDelta::new(STAGE_SCRIPT, s, s),
                StageDelta::new(STAGE_EXACT, s, s),
                StageDelta::new(STAGE_MINHASH, s, s),
            ],
        )];
        let points = retention_table(&manifests).unwrap();
        assert_eq!(points[0].frac_docs_retained, 1.0);
        assert_eq!(points[0].frac_chars_retained, 1.0);
    }

    #[test]
    fn missing_stage_names_wiki_and_stage() {
        let s = CorpusStats { doc_count: 10, char_count: 100 };
        let manifests = vec![(
            "ceb".to_string(),
            vec![StageDelta::new(STAGE_SCRIPT, s, s)],
        )];
        let err = retention_table(&manifests).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ceb") && msg.contains(STAGE_EXACT), "got {msg}");
    }
}
