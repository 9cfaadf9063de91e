//! Script-based character filtering, a proxy for language identification.
//!
//! Each language maps to its officially documented Unicode script(s); any
//! character outside that set is removed from the article. Characters with
//! Script=Common or Inherited (digits, punctuation, spaces, combining marks)
//! are always retained, since they are shared across scripts. Trained
//! language-ID models are deliberately not used here.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use thiserror::Error;
use unicode_script::{Script, UnicodeScript};

use crate::corpus::Document;

const DEFAULT_REGISTRY: &str = include_str!("../data/default_scripts.txt");

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: unknown script: {name}")]
    UnknownScript { line: usize, name: String },
    #[error("line {line}: duplicate language code: {code}")]
    DuplicateLang { line: usize, code: String },
    #[error("line {line}: expected `code: script[, script...]`")]
    MalformedLine { line: usize },
    #[error("no script entry for {lang}")]
    NoEntry { lang: String },
}

/// Map from wiki language code to its allowed scripts.
#[derive(Debug, Clone, Default)]
pub struct ScriptRegistry {
    map: HashMap<String, Vec<Script>>,
}

impl ScriptRegistry {
    /// The built-in table derived from the "List of Wikipedias" scripts
    /// column. Covers the common wiki codes; extend with [`Self::merge`].
    pub fn default_registry() -> Self {
        Self::parse(DEFAULT_REGISTRY).expect("built-in registry is valid")
    }

    pub fn load(path: &Path) -> Result<Self, ScriptError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScriptError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Parses the registry format: one `code: Script[, Script...]` per line,
    /// `#` comments. Unknown script names and duplicate codes are rejected.
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut map = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (code, names) = content
                .split_once(':')
                .ok_or(ScriptError::MalformedLine { line })?;
            let code = code.trim();
            if code.is_empty() {
                return Err(ScriptError::MalformedLine { line });
            }
            let mut scripts = Vec::new();
            for name in names.split(',') {
                let name = name.trim();
                if name.is_empty() {
                    return Err(ScriptError::MalformedLine { line });
                }
                let script = parse_script_name(name).ok_or_else(|| ScriptError::UnknownScript {
                    line,
                    name: name.to_string(),
                })?;
                if !scripts.contains(&script) {
                    scripts.push(script);
                }
            }
            if scripts.is_empty() {
                return Err(ScriptError::MalformedLine { line });
            }
            sort_scripts(&mut scripts);
            if map.insert(code.to_string(), scripts).is_some() {
                return Err(ScriptError::DuplicateLang {
                    line,
                    code: code.to_string(),
                });
            }
        }
        Ok(ScriptRegistry { map })
    }

    /// Layers `other` over `self`, replacing any shared language codes.
    pub fn merge(&mut self, other: ScriptRegistry) {
        self.map.extend(other.map);
    }

    pub fn scripts(&self, lang: &str) -> Option<&[Script]> {
        self.map.get(lang).map(Vec::as_slice)
    }

    pub fn contains(&self, lang: &str) -> bool {
        self.map.contains_key(lang)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Accepts Unicode Script full names, with spaces tolerated for the
/// multi-word ones (`Canadian Aboriginal` == `Canadian_Aboriginal`).
fn parse_script_name(name: &str) -> Option<Script> {
    Script::from_full_name(name).or_else(|| Script::from_full_name(&name.replace(' ', "_")))
}

fn sort_scripts(scripts: &mut [Script]) {
    scripts.sort_by_key(|s| s.full_name());
}

/// Result of filtering one document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptFilterOutcome {
    pub document: Document,
    /// Characters removed, in Unicode scalar values.
    pub removed_chars: u64,
    /// True when nothing but whitespace survived; the text is then emptied
    /// so the document can be dropped at the stage boundary.
    pub dropped: bool,
}

/// Counts characters by Unicode Script property full name.
///
/// The counts partition the text: every character lands in exactly one
/// bucket, with shared characters under "Common" or "Inherited".
pub fn script_profile(text: &str) -> BTreeMap<&'static str, u64> {
    let mut counts = BTreeMap::new();
    for ch in text.chars() {
        *counts.entry(ch.script().full_name()).or_insert(0) += 1;
    }
    counts
}

/// Removes characters whose script is neither allowed for `doc.lang` nor
/// Common/Inherited. Character order is preserved; a document whose filtered
/// text trims to empty is marked dropped.
pub fn filter_document(
    doc: Document,
    registry: &ScriptRegistry,
) -> Result<ScriptFilterOutcome, ScriptError> {
    let allowed = registry.scripts(&doc.lang).ok_or_else(|| ScriptError::NoEntry {
        lang: doc.lang.clone(),
    })?;
    let before = doc.text.chars().count() as u64;
    let filtered: String = doc
        .text
        .chars()
        .filter(|ch| {
            let script = ch.script();
            script == Script::Common || script == Script::Inherited || allowed.contains(&script)
        })
        .collect();
    let dropped = filtered.trim().is_empty();
    let (text, removed_chars) = if dropped {
        (String::new(), before)
    } else {
        let after = filtered.chars().count() as u64;
        (filtered, before - after)
    };
    Ok(ScriptFilterOutcome {
        document: Document { text, ..doc },
        removed_chars,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(lang: &str, text: &str) -> Document {
        Document {
            id: "1".into(),
            title: "t".into(),
            text: text.into(),
            lang: lang.into(),
        }
    }

    #[test]
    fn single_script_entry() {
        let reg = ScriptRegistry::parse("yo: Latin").unwrap();
        assert_eq!(reg.scripts("yo").unwrap(), &[Script::Latin]);
    }

    #[test]
    fn three_script_entry() {
        let reg = ScriptRegistry::parse("gom: Devanagari, Latin, Kannada").unwrap();
        assert_eq!(reg.scripts("gom").unwrap().len(), 3);
        assert!(reg.scripts("gom").unwrap().contains(&Script::Kannada));
    }

    #[test]
    fn unknown_script_rejected_by_name() {
        let err = ScriptRegistry::parse("xx: Klingon").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown script") && msg.contains("Klingon"), "got: {msg}");
    }

    #[test]
    fn duplicate_lang_rejected() {
        let err = ScriptRegistry::parse("yo: Latin\nyo: Latin").unwrap_err();
        assert!(err.to_string().contains("duplicate language code: yo"));
    }

    #[test]
    fn default_registry_parses_and_covers_known_codes() {
        let reg = ScriptRegistry::default_registry();
        for code in ["yo", "ceb", "as", "gom", "war", "sv", "ar", "zh", "am"] {
            assert!(reg.contains(code), "missing {code}");
        }
        assert_eq!(
            reg.scripts("gom").unwrap(),
            &[Script::Devanagari, Script::Kannada, Script::Latin]
        );
    }

    #[test]
    fn profile_counts_latin_and_common() {
        let profile = script_profile("abc");
        assert_eq!(profile.get("Latin"), Some(&3));
        assert_eq!(profile.len(), 1);

        let profile = script_profile("a 1");
        assert_eq!(profile.get("Latin"), Some(&1));
        // Space and digit both carry Script=Common.
        assert_eq!(profile.get("Common"), Some(&2));
    }

    #[test]
    fn profile_of_empty_text_is_empty() {
        assert!(script_profile("").is_empty());
    }

    #[test]
    fn profile_partitions_all_characters() {
        let text = "аbс漢 ́1"; // Cyrillic а/с, Latin b, Han, space, combining acute, digit
        let profile = script_profile(text);
        let total: u64 = profile.values().sum();
        assert_eq!(total, text.chars().count() as u64);
        assert_eq!(profile.get("Inherited"), Some(&1));
    }

    #[test]
    fn all_allowed_text_unchanged() {
        let reg = ScriptRegistry::default_registry();
        let out = filter_document(doc("yo", "bàtà"), &reg).unwrap();
        assert_eq!(out.document.text, "bàtà");
        assert_eq!(out.removed_chars, 0);
        assert!(!out.dropped);
    }

    #[test]
    fn foreign_latin_removed_from_bengali_doc() {
        let reg = ScriptRegistry::parse("as: Bengali").unwrap();
        let out = filter_document(doc("as", "অসম abc"), &reg).unwrap();
        assert_eq!(out.document.text, "অসম ");
        assert_eq!(out.removed_chars, 3);
        assert!(!out.dropped);
    }

    #[test]
    fn all_foreign_text_dropped() {
        let reg = ScriptRegistry::default_registry();
        let out = filter_document(doc("yo", "日本語"), &reg).unwrap();
        assert_eq!(out.document.text, "");
        assert_eq!(out.removed_chars, 3);
        assert!(out.dropped);
    }

    #[test]
    fn whitespace_only_residue_is_dropped() {
        let reg = ScriptRegistry::default_registry();
        let out = filter_document(doc("yo", " 日本 "), &reg).unwrap();
        assert!(out.dropped);
        assert_eq!(out.document.text, "");
        assert_eq!(out.removed_chars, 4);
    }

    #[test]
    fn missing_lang_is_an_error() {
        let reg = ScriptRegistry::parse("yo: Latin").unwrap();
        let err = filter_document(doc("zz-zz", "x"), &reg).unwrap_err();
        assert!(err.to_string().contains("no script entry for zz-zz"));
    }

    #[test]
    fn filter_is_idempotent_and_conserves_chars() {
        let reg = ScriptRegistry::default_registry();
        let original = doc("yo", "bàtà 漢字 ẹsẹ̀ 123, кирилл end");
        let before = original.char_count();
        let first = filter_document(original, &reg).unwrap();
        assert_eq!(
            first.removed_chars + first.document.char_count(),
            before,
            "conservation"
        );
        let second = filter_document(first.document.clone(), &reg).unwrap();
        assert_eq!(second.removed_chars, 0);
        assert_eq!(second.document, first.document);
    }

    #[test]
    fn corpus_removed_chars_sum_matches_stage_totals() {
        // No double counting: per-document removals add up to the corpus
        // delta even when some documents drop entirely.
        let reg = ScriptRegistry::default_registry();
        let texts = ["bàtà kan", "日本語", "ilu 漢 nla", " ", "ọjà tuntun"];
        let mut before_total = 0u64;
        let mut after_total = 0u64;
        let mut removed_total = 0u64;
        for (i, text) in texts.iter().enumerate() {
            let d = Document {
                id: i.to_string(),
                title: String::new(),
                text: text.to_string(),
                lang: "yo".into(),
            };
            before_total += d.char_count();
            let out = filter_document(d, &reg).unwrap();
            removed_total += out.removed_chars;
            if !out.dropped {
                after_total += out.document.char_count();
            }
        }
        assert_eq!(removed_total + after_total, before_total);
    }

    #[test]
    fn filtered_text_is_a_subsequence() {
        let reg = ScriptRegistry::default_registry();
        let text = "aжbзc де f";
        let out = filter_document(doc("yo", text), &reg).unwrap();
        let mut original = text.chars();
        for ch in out.document.text.chars() {
            assert!(original.any(|o| o == ch), "order not preserved for {ch}");
        }
    }
}
