//! Exact and MinHash/LSH near-duplicate removal.
//!
//! Exact deduplication groups articles by a SHA-256 hash of the text alone
//! (ids and titles differ between copies). Near-deduplication shingles each
//! document into word 5-grams, sketches the shingle sets with 128 MinHash
//! permutations, finds candidate pairs via 16x8 LSH banding, verifies
//! candidates against the Jaccard threshold (0.85), and merges verified
//! pairs into clusters with union-find. The earliest document in input
//! order represents each cluster; everything else in the cluster is removed.

mod union_find;

pub use union_find::UnionFind;

use std::collections::{BTreeSet, HashMap};
use std::hash::Hasher;

use fxhash::FxHasher64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Document;

/// Largest Mersenne prime below 2^64; the modulus of the permutation family.
const MERSENNE_61: u128 = (1 << 61) - 1;

#[derive(Debug, Error)]
pub enum DedupError {
    #[error("invalid dedup parameters: {0}")]
    InvalidParams(String),
    #[error("cannot sign empty document {doc_id}")]
    EmptyShingleSet { doc_id: String },
    #[error("signature length mismatch: {left} vs {right}")]
    SignatureMismatch { left: usize, right: usize },
}

/// Tuning knobs for near-deduplication.
///
/// Defaults are standard web-dedup settings: the 16x8 LSH s-curve has
/// near-unit candidate recall at the 0.85 Jaccard cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupParams {
    /// Jaccard similarity at or above which a pair is a duplicate.
    pub threshold: f64,
    /// MinHash permutation count P.
    pub permutations: usize,
    /// LSH band count b; `bands * rows` must equal `permutations`.
    pub bands: usize,
    /// Rows per band r.
    pub rows: usize,
    /// Words per shingle.
    pub shingle_words: usize,
    pub seed: u64,
    /// Verify candidate pairs with exact Jaccard over shingle sets instead
    /// of the signature estimate (slower; auditing aid).
    pub exact_verify: bool,
}

impl Default for DedupParams {
    fn default() -> Self {
        DedupParams {
            threshold: 0.85,
            permutations: 128,
            bands: 16,
            rows: 8,
            shingle_words: 5,
            seed: 0,
            exact_verify: false,
        }
    }
}

impl DedupParams {
    pub fn validate(&self) -> Result<(), DedupError> {
        if self.permutations == 0 {
            return Err(DedupError::InvalidParams("permutations must be >= 1".into()));
        }
        if self.bands * self.rows != self.permutations {
            return Err(DedupError::InvalidParams(format!(
                "bands * rows must equal permutations ({} * {} != {})",
                self.bands, self.rows, self.permutations
            )));
        }
        if self.shingle_words == 0 {
            return Err(DedupError::InvalidParams("shingle width must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(DedupError::InvalidParams(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupReason {
    Unique,
    ExactDuplicate,
    NearDuplicate,
}

/// Per-document keep/remove decision.
///
/// A kept document is either unique or the representative of its duplicate
/// cluster; `similarity` is present exactly for near-duplicates and carries
/// the strongest verified pair similarity the document participated in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupVerdict {
    pub doc_id: String,
    pub kept: bool,
    pub reason: DedupReason,
    pub cluster_id: Option<String>,
    pub similarity: Option<f64>,
}

/// Removes documents whose text is byte-identical to an earlier document.
///
/// Ids and titles are ignored; placeholder articles typically share text
/// under distinct titles. Returns kept documents (input order) and one
/// verdict per input document (input order).
pub fn exact_dedup(docs: Vec<Document>) -> (Vec<Document>, Vec<DedupVerdict>) {
    let mut first_by_hash: HashMap<[u8; 32], usize> = HashMap::new();
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (idx, doc) in docs.iter().enumerate() {
        let digest: [u8; 32] = Sha256::digest(doc.text.as_bytes()).into();
        let rep = *first_by_hash.entry(digest).or_insert(idx);
        groups.entry(rep).or_default().push(idx);
    }
    let mut verdicts: Vec<Option<DedupVerdict>> = vec![None; docs.len()];
    for (&rep, members) in &groups {
        if members.len() == 1 {
            verdicts[rep] = Some(DedupVerdict {
                doc_id: docs[rep].id.clone(),
                kept: true,
                reason: DedupReason::Unique,
                cluster_id: None,
                similarity: None,
            });
        } else {
            for &idx in members {
                verdicts[idx] = Some(DedupVerdict {
                    doc_id: docs[idx].id.clone(),
                    kept: idx == rep,
                    reason: DedupReason::ExactDuplicate,
                    cluster_id: Some(docs[rep].id.clone()),
                    similarity: None,
                });
            }
        }
    }
    let verdicts: Vec<DedupVerdict> = verdicts.into_iter().map(Option::unwrap).collect();
    let kept = docs
        .into_iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.kept)
        .map(|(d, _)| d)
        .collect();
    (kept, verdicts)
}

/// A document's set of hashed word n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShingleSet {
    pub doc_id: String,
    /// Sorted, deduplicated shingle hashes.
    pub shingles: Vec<u64>,
}

impl ShingleSet {
    pub fn is_empty(&self) -> bool {
        self.shingles.is_empty()
    }
}

/// Hashes all consecutive `n`-word windows of `text` (whitespace tokens,
/// case-folded). Documents shorter than `n` words fall back to one shingle
/// per word so that short documents remain signable.
pub fn shingle(doc_id: &str, text: &str, n: usize) -> Result<ShingleSet, DedupError> {
    if n == 0 {
        return Err(DedupError::InvalidParams("shingle width must be >= 1".into()));
    }
    let folded = text.to_lowercase();
    let words: Vec<&str> = folded.split_whitespace().collect();
    let mut hashes: Vec<u64> = if words.len() >= n {
        words.windows(n).map(hash_window).collect()
    } else {
        words.iter().map(|w| hash_window(std::slice::from_ref(w))).collect()
    };
    hashes.sort_unstable();
    hashes.dedup();
    Ok(ShingleSet {
        doc_id: doc_id.to_string(),
        shingles: hashes,
    })
}

fn hash_window(words: &[&str]) -> u64 {
    let mut hasher = FxHasher64::default();
    for (i, word) in words.iter().enumerate() {
        if i > 0 {
            hasher.write_u8(b' ');
        }
        hasher.write(word.as_bytes());
    }
    hasher.finish()
}

/// Exact Jaccard similarity of two shingle sets (sorted-merge intersection).
pub fn exact_jaccard(a: &ShingleSet, b: &ShingleSet) -> f64 {
    if a.shingles.is_empty() && b.shingles.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut both) = (0, 0, 0usize);
    while i < a.shingles.len() && j < b.shingles.len() {
        match a.shingles[i].cmp(&b.shingles[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                both += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.shingles.len() + b.shingles.len() - both;
    both as f64 / union as f64
}

/// Fixed-length MinHash sketch of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub doc_id: String,
    /// Per-permutation minima; length is the permutation count P.
    pub minima: Vec<u64>,
}

/// A seeded universal-hash permutation family `x -> (a*x + b) mod (2^61-1)`.
///
/// Reused across every document of a corpus so signatures are comparable.
pub struct MinHasher {
    coeffs: Vec<(u64, u64)>,
}

impl MinHasher {
    pub fn new(permutations: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..permutations)
            .map(|_| {
                let a = rng.gen_range(1..MERSENNE_61 as u64);
                let b = rng.gen_range(0..MERSENNE_61 as u64);
                (a, b)
            })
            .collect();
        MinHasher { coeffs }
    }

    pub fn permutations(&self) -> usize {
        self.coeffs.len()
    }

    /// `minima[k] = min over shingles of permutation_k(shingle)`.
    pub fn signature(&self, set: &ShingleSet) -> Result<Signature, DedupError> {
        if set.shingles.is_empty() {
            return Err(DedupError::EmptyShingleSet {
                doc_id: set.doc_id.clone(),
            });
        }
        let minima = self
            .coeffs
            .iter()
            .map(|&(a, b)| {
                set.shingles
                    .iter()
                    .map(|&x| permute(x, a, b))
                    .min()
                    .expect("nonempty shingle set")
            })
            .collect();
        Ok(Signature {
            doc_id: set.doc_id.clone(),
            minima,
        })
    }
}

#[inline]
fn permute(x: u64, a: u64, b: u64) -> u64 {
    let x = (x as u128) % MERSENNE_61;
    ((a as u128 * x + b as u128) % MERSENNE_61) as u64
}

/// One-off signature computation; corpus runs should reuse a [`MinHasher`].
pub fn minhash_signature(
    set: &ShingleSet,
    permutations: usize,
    seed: u64,
) -> Result<Signature, DedupError> {
    MinHasher::new(permutations, seed).signature(set)
}

/// Estimated Jaccard: the fraction of equal signature positions.
pub fn estimated_jaccard(a: &Signature, b: &Signature) -> Result<f64, DedupError> {
    if a.minima.len() != b.minima.len() {
        return Err(DedupError::SignatureMismatch {
            left: a.minima.len(),
            right: b.minima.len(),
        });
    }
    if a.minima.is_empty() {
        return Ok(0.0);
    }
    let equal = a
        .minima
        .iter()
        .zip(&b.minima)
        .filter(|(x, y)| x == y)
        .count();
    Ok(equal as f64 / a.minima.len() as f64)
}

/// Candidate pairs from LSH banding: a pair is emitted iff the two
/// signatures agree on all `rows` positions of at least one band. Pairs are
/// unordered document-id pairs, each emitted once.
pub fn lsh_candidates(
    signatures: &[Signature],
    bands: usize,
    rows: usize,
) -> Result<BTreeSet<(String, String)>, DedupError> {
    if signatures.is_empty() {
        return Ok(BTreeSet::new());
    }
    let width = signatures[0].minima.len();
    if bands * rows != width {
        return Err(DedupError::InvalidParams(format!(
            "bands * rows must equal signature length ({bands} * {rows} != {width})"
        )));
    }
    for sig in signatures {
        if sig.minima.len() != width {
            return Err(DedupError::SignatureMismatch {
                left: width,
                right: sig.minima.len(),
            });
        }
    }
    // One bucket table per band, built independently so bands can shard.
    let index_pairs: BTreeSet<(usize, usize)> = (0..bands)
        .into_par_iter()
        .map(|band| {
            let lo = band * rows;
            let hi = lo + rows;
            let mut buckets: HashMap<&[u64], Vec<usize>> = HashMap::new();
            for (idx, sig) in signatures.iter().enumerate() {
                buckets.entry(&sig.minima[lo..hi]).or_default().push(idx);
            }
            let mut pairs = BTreeSet::new();
            for members in buckets.into_values() {
                for (i, &a) in members.iter().enumerate() {
                    for &b in &members[i + 1..] {
                        pairs.insert((a.min(b), a.max(b)));
                    }
                }
            }
            pairs
        })
        .reduce(BTreeSet::new, |mut acc, set| {
            acc.extend(set);
            acc
        });
    Ok(index_pairs
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (&signatures[a].doc_id, &signatures[b].doc_id);
            if x <= y {
                (x.clone(), y.clone())
            } else {
                (y.clone(), x.clone())
            }
        })
        .collect())
}

/// MinHash near-deduplication over a corpus.
///
/// LSH candidates are verified (by signature estimate, or exact Jaccard
/// with `exact_verify`); verified pairs merge into clusters via union-find;
/// each cluster keeps its earliest document in input order. Verdicts come
/// back in input order. Documents with no shingles (empty text) cannot be
/// near-duplicates and pass through as unique.
pub fn minhash_dedup(
    docs: Vec<Document>,
    params: &DedupParams,
) -> Result<(Vec<Document>, Vec<DedupVerdict>), DedupError> {
    params.validate()?;
    let shingle_sets: Vec<ShingleSet> = docs
        .par_iter()
        .map(|doc| shingle(&doc.id, &doc.text, params.shingle_words))
        .collect::<Result<_, _>>()?;

    let hasher = MinHasher::new(params.permutations, params.seed);
    let signable: Vec<usize> = (0..docs.len())
        .filter(|&i| !shingle_sets[i].is_empty())
        .collect();
    let signatures: Vec<Signature> = signable
        .par_iter()
        .map(|&i| hasher.signature(&shingle_sets[i]))
        .collect::<Result<_, _>>()?;
    let index_of: HashMap<&str, usize> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id.as_str(), i))
        .collect();

    let candidates = lsh_candidates(&signatures, params.bands, params.rows)?;
    let sig_of: HashMap<&str, &Signature> =
        signatures.iter().map(|s| (s.doc_id.as_str(), s)).collect();

    let mut uf = UnionFind::new(docs.len());
    let mut best_sim: Vec<Option<f64>> = vec![None; docs.len()];
    for (id_a, id_b) in &candidates {
        let (ia, ib) = (index_of[id_a.as_str()], index_of[id_b.as_str()]);
        let sim = if params.exact_verify {
            exact_jaccard(&shingle_sets[ia], &shingle_sets[ib])
        } else {
            estimated_jaccard(sig_of[id_a.as_str()], sig_of[id_b.as_str()])?
        };
        if sim >= params.threshold {
            uf.union(ia, ib);
            for idx in [ia, ib] {
                best_sim[idx] = Some(best_sim[idx].map_or(sim, |s: f64| s.max(sim)));
            }
        }
    }

    let mut verdicts: Vec<DedupVerdict> = docs
        .iter()
        .map(|d| DedupVerdict {
            doc_id: d.id.clone(),
            kept: true,
            reason: DedupReason::Unique,
            cluster_id: None,
            similarity: None,
        })
        .collect();
    for cluster in uf.clusters() {
        let rep = cluster[0];
        for &idx in &cluster {
            verdicts[idx] = DedupVerdict {
                doc_id: docs[idx].id.clone(),
                kept: idx == rep,
                reason: DedupReason::NearDuplicate,
                cluster_id: Some(docs[rep].id.clone()),
                similarity: best_sim[idx],
            };
        }
    }
    let kept = docs
        .into_iter()
        .zip(&verdicts)
        .filter(|(_, v)| v.kept)
        .map(|(d, _)| d)
        .collect();
    Ok((kept, verdicts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.to_string(),
            title: format!("T{id}"),
            text: text.to_string(),
            lang: "yo".into(),
        }
    }

    /// Builds a shingle set with the given raw hash values (test backdoor).
    fn raw_set(id: &str, values: impl IntoIterator<Item = u64>) -> ShingleSet {
        let mut shingles: Vec<u64> = values.into_iter().collect();
        shingles.sort_unstable();
        shingles.dedup();
        ShingleSet {
            doc_id: id.to_string(),
            shingles,
        }
    }

    #[test]
    fn exact_dedup_keeps_first_of_each_text() {
        let docs = vec![doc("1", "A"), doc("2", "B"), doc("3", "A"), doc("4", "A")];
        let (kept, verdicts) = exact_dedup(docs);
        assert_eq!(kept.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), ["1", "2"]);
        assert_eq!(verdicts.iter().filter(|v| !v.kept).count(), 2);
        assert_eq!(verdicts[2].reason, DedupReason::ExactDuplicate);
        assert_eq!(verdicts[2].cluster_id.as_deref(), Some("1"));
        assert_eq!(verdicts[1].reason, DedupReason::Unique);
        // Representative stays kept and carries its cluster id.
        assert!(verdicts[0].kept);
        assert_eq!(verdicts[0].cluster_id.as_deref(), Some("1"));
    }

    #[test]
    fn exact_dedup_all_distinct_removes_nothing() {
        let docs: Vec<_> = (0..50).map(|i| doc(&i.to_string(), &format!("text {i}"))).collect();
        let (kept, verdicts) = exact_dedup(docs.clone());
        assert_eq!(kept, docs);
        assert!(verdicts.iter().all(|v| v.kept && v.reason == DedupReason::Unique));
    }

    #[test]
    fn exact_dedup_is_idempotent() {
        let docs = vec![doc("1", "A"), doc("2", "A"), doc("3", "B")];
        let (kept, _) = exact_dedup(docs);
        let (kept2, verdicts2) = exact_dedup(kept.clone());
        assert_eq!(kept2, kept);
        assert!(verdicts2.iter().all(|v| v.kept));
    }

    #[test]
    fn shingle_two_word_windows() {
        let set = shingle("d", "a b c", 2).unwrap();
        assert_eq!(set.shingles.len(), 2);
        let expected: Vec<u64> = {
            let mut v = vec![hash_window(&["a", "b"]), hash_window(&["b", "c"])];
            v.sort_unstable();
            v
        };
        assert_eq!(set.shingles, expected);
    }

    #[test]
    fn shingle_falls_back_to_words_for_short_docs() {
        let set = shingle("d", "a", 5).unwrap();
        assert_eq!(set.shingles.len(), 1);
    }

    #[test]
    fn shingle_set_semantics() {
        let set = shingle("d", "a b a b", 2).unwrap();
        // windows: "a b", "b a", "a b" -> two distinct shingles
        assert_eq!(set.shingles.len(), 2);
    }

    #[test]
    fn shingle_empty_text_is_empty() {
        assert!(shingle("d", "", 3).unwrap().is_empty());
    }

    #[test]
    fn shingle_case_folds() {
        assert_eq!(
            shingle("a", "The Cat", 2).unwrap().shingles,
            shingle("b", "the cat", 2).unwrap().shingles
        );
    }

    #[test]
    fn signatures_deterministic_for_fixed_seed() {
        let set = shingle("d", "one two three four five six seven", 3).unwrap();
        let a = minhash_signature(&set, 64, 7).unwrap();
        let b = minhash_signature(&set, 64, 7).unwrap();
        assert_eq!(a, b);
        let c = minhash_signature(&set, 64, 8).unwrap();
        assert_ne!(a.minima, c.minima);
    }

    #[test]
    fn empty_set_cannot_be_signed() {
        let set = raw_set("d", []);
        let err = minhash_signature(&set, 16, 0).unwrap_err();
        assert!(err.to_string().contains("cannot sign empty document"));
    }

    #[test]
    fn disjoint_sets_estimate_near_zero() {
        let p = 128;
        let a = raw_set("a", (0..200u64).map(|i| i * 2));
        let b = raw_set("b", (0..200u64).map(|i| i * 2 + 1));
        let ha = minhash_signature(&a, p, 3).unwrap();
        let hb = minhash_signature(&b, p, 3).unwrap();
        let est = estimated_jaccard(&ha, &hb).unwrap();
        assert!(est <= 2.0 / (p as f64).sqrt(), "est {est} too high");
    }

    #[test]
    fn half_overlap_estimate_within_tolerance() {
        // |A ∩ B| = 50, |A ∪ B| = 100 -> exact J = 0.5; tolerance is
        // 2*sqrt(J(1-J)/P) ~ 0.088, asserted at 0.09 per the binomial bound.
        let shared: Vec<u64> = (0..50u64).map(|i| i.wrapping_mul(0x9E3779B97F4A7C15)).collect();
        let only_a: Vec<u64> = (100..125u64).map(|i| i.wrapping_mul(0x517CC1B727220A95)).collect();
        let only_b: Vec<u64> = (200..225u64).map(|i| i.wrapping_mul(0x2545F4914F6CDD1D)).collect();
        let a = raw_set("a", shared.iter().chain(&only_a).copied());
        let b = raw_set("b", shared.iter().chain(&only_b).copied());
        assert_eq!(a.shingles.len(), 75);
        assert_eq!(b.shingles.len(), 75);
        assert!((exact_jaccard(&a, &b) - 0.5).abs() < 1e-15);
        let ha = minhash_signature(&a, 128, 11).unwrap();
        let hb = minhash_signature(&b, 128, 11).unwrap();
        let est = estimated_jaccard(&ha, &hb).unwrap();
        assert!((est - 0.5).abs() <= 0.09, "estimate {est} off by more than 0.09");
    }

    #[test]
    fn identical_signatures_are_candidates() {
        let set = shingle("x", "the quick brown fox jumps over the lazy dog", 3).unwrap();
        let hasher = MinHasher::new(32, 5);
        let mut sig_a = hasher.signature(&set).unwrap();
        sig_a.doc_id = "a".into();
        let mut sig_b = sig_a.clone();
        sig_b.doc_id = "b".into();
        let pairs = lsh_candidates(&[sig_a, sig_b], 8, 4).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs.contains(&("a".to_string(), "b".to_string())));
    }

    #[test]
    fn fully_distinct_signatures_yield_no_pairs() {
        let sigs = vec![
            Signature { doc_id: "a".into(), minima: (0..32).collect() },
            Signature { doc_id: "b".into(), minima: (100..132).collect() },
        ];
        assert!(lsh_candidates(&sigs, 8, 4).unwrap().is_empty());
    }

    #[test]
    fn banding_shape_must_match_signature() {
        let sigs = vec![Signature { doc_id: "a".into(), minima: vec![0; 32] }];
        assert!(lsh_candidates(&sigs, 7, 4).is_err());
    }

    #[test]
    fn near_duplicate_with_small_suffix_is_removed() {
        // ~100 words plus a 5-word suffix: shingle Jaccard ~ (96)/(96+5) > 0.9.
        let base: Vec<String> = (0..100).map(|i| format!("word{i}")).collect();
        let original = base.join(" ");
        let mut extended = base.clone();
        extended.extend((0..5).map(|i| format!("extra{i}")));
        let longer = extended.join(" ");

        let sa = shingle("a", &original, 5).unwrap();
        let sb = shingle("b", &longer, 5).unwrap();
        assert!(exact_jaccard(&sa, &sb) >= 0.9, "fixture J too low");

        let docs = vec![doc("a", &original), doc("b", &longer), doc("c", "completely different text here")];
        let (kept, verdicts) = minhash_dedup(docs, &DedupParams::default()).unwrap();
        assert_eq!(kept.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), ["a", "c"]);
        assert_eq!(verdicts[1].reason, DedupReason::NearDuplicate);
        assert_eq!(verdicts[1].cluster_id.as_deref(), Some("a"));
        let sim = verdicts[1].similarity.unwrap();
        assert!(sim >= 0.85, "recorded similarity {sim}");
        assert!(verdicts[0].kept && verdicts[0].similarity.is_some());
    }

    #[test]
    fn exact_verify_mode_checks_true_jaccard() {
        let base: Vec<String> = (0..90).map(|i| format!("ogun{i}")).collect();
        let text_a = base.join(" ");
        let text_b = format!("{text_a} iru afikun die");
        let docs = vec![doc("a", &text_a), doc("b", &text_b)];
        let params = DedupParams {
            exact_verify: true,
            ..DedupParams::default()
        };
        let (kept, verdicts) = minhash_dedup(docs, &params).unwrap();
        assert_eq!(kept.len(), 1);
        let sa = shingle("a", &text_a, 5).unwrap();
        let sb = shingle("b", &text_b, 5).unwrap();
        // The recorded similarity is the exact Jaccard, not the estimate.
        assert_eq!(verdicts[1].similarity, Some(exact_jaccard(&sa, &sb)));
    }

    #[test]
    fn dissimilar_corpus_loses_nothing() {
        // 50 documents, pairwise exact Jaccard far below threshold.
        let docs: Vec<Document> = (0..50)
            .map(|i| {
                let words: Vec<String> = (0..40).map(|j| format!("w{i}x{j}")).collect();
                doc(&i.to_string(), &words.join(" "))
            })
            .collect();
        let sets: Vec<ShingleSet> = docs
            .iter()
            .map(|d| shingle(&d.id, &d.text, 5).unwrap())
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                assert!(exact_jaccard(&sets[i], &sets[j]) < 0.3);
            }
        }
        let (kept, verdicts) = minhash_dedup(docs.clone(), &DedupParams::default()).unwrap();
        assert_eq!(kept.len(), docs.len());
        assert!(verdicts.iter().all(|v| v.kept));
    }

    #[test]
    fn minhash_dedup_is_idempotent() {
        let base: Vec<String> = (0..80).map(|i| format!("tok{i}")).collect();
        let text_a = base.join(" ");
        let text_b = format!("{text_a} tail");
        let docs = vec![doc("a", &text_a), doc("b", &text_b), doc("c", "other stuff entirely")];
        let (kept, _) = minhash_dedup(docs, &DedupParams::default()).unwrap();
        let (kept2, verdicts2) = minhash_dedup(kept.clone(), &DedupParams::default()).unwrap();
        assert_eq!(kept2, kept);
        assert!(verdicts2.iter().all(|v| v.kept));
    }

    #[test]
    fn empty_documents_pass_through_unique() {
        let docs = vec![doc("a", ""), doc("b", ""), doc("c", "real body text here")];
        let (kept, verdicts) = minhash_dedup(docs, &DedupParams::default()).unwrap();
        assert_eq!(kept.len(), 3);
        assert!(verdicts.iter().all(|v| v.reason == DedupReason::Unique));
    }

    #[test]
    fn estimator_is_unbiased_over_random_pairs() {
        // 200 random set pairs; mean(estimate - exact) within ±0.01.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut total_err = 0.0;
        let trials = 200;
        for t in 0..trials {
            let union: usize = rng.gen_range(60..200);
            let inter = rng.gen_range(0..=union);
            let shared: Vec<u64> = (0..inter as u64).map(|i| i * 1000 + t).collect();
            let rest = union - inter;
            let a_extra = rest / 2;
            let only_a: Vec<u64> = (0..a_extra as u64).map(|i| 1_000_000 + i * 7 + t).collect();
            let only_b: Vec<u64> =
                (0..(rest - a_extra) as u64).map(|i| 2_000_000 + i * 13 + t).collect();
            let a = raw_set("a", shared.iter().chain(&only_a).copied());
            let b = raw_set("b", shared.iter().chain(&only_b).copied());
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let exact = exact_jaccard(&a, &b);
            let hasher = MinHasher::new(128, t);
            let est = estimated_jaccard(
                &hasher.signature(&a).unwrap(),
                &hasher.signature(&b).unwrap(),
            )
            .unwrap();
            total_err += est - exact;
        }
        let bias = total_err / trials as f64;
        assert!(bias.abs() < 0.01, "estimator bias {bias}");
    }
}
