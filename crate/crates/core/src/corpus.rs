//! Document corpora: the line-delimited JSON interchange format, corpus
//! statistics, and per-stage retention deltas.
//!
//! The canonical on-disk format is UTF-8 JSONL with one object per line
//! carrying `id`, `title`, `text`, and `lang`. Wiki XML dumps are converted
//! into this format by [`crate::wikixml`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wikixml::WikiXmlReader;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {msg}")]
    MalformedRecord { line: usize, msg: String },
    #[error("line {line}: missing key: {key}")]
    MissingKey { line: usize, key: &'static str },
    #[error("line {line}: empty document id")]
    EmptyId { line: usize },
    #[error("truncated XML at byte {offset}")]
    TruncatedXml { offset: u64 },
    #[error("XML parse error at byte {offset}: {msg}")]
    Xml { offset: u64, msg: String },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One article: the unit every pipeline stage operates on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub text: String,
    /// Wiki language code, e.g. `"yo"` or `"ceb"`.
    pub lang: String,
}

impl Document {
    /// Character count in Unicode scalar values, not bytes. Byte counts
    /// would overweight multi-byte scripts when comparing corpora.
    pub fn char_count(&self) -> u64 {
        self.text.chars().count() as u64
    }
}

/// Document and character totals for a corpus snapshot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub doc_count: u64,
    pub char_count: u64,
}

impl CorpusStats {
    pub fn add(&mut self, doc: &Document) {
        self.doc_count += 1;
        self.char_count += doc.char_count();
    }

    pub fn from_docs<'a>(docs: impl IntoIterator<Item = &'a Document>) -> Self {
        let mut stats = CorpusStats::default();
        for doc in docs {
            stats.add(doc);
        }
        stats
    }
}

/// Before/after counts for one pipeline stage.
///
/// Stages only ever remove content, so `after <= before` on both axes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDelta {
    pub stage_name: String,
    pub docs_before: u64,
    pub docs_after: u64,
    pub chars_before: u64,
    pub chars_after: u64,
}

impl StageDelta {
    pub fn new(stage_name: impl Into<String>, before: CorpusStats, after: CorpusStats) -> Self {
        let stage_name = stage_name.into();
        assert!(
            after.doc_count <= before.doc_count && after.char_count <= before.char_count,
            "stage {stage_name} grew the corpus"
        );
        StageDelta {
            stage_name,
            docs_before: before.doc_count,
            docs_after: after.doc_count,
            chars_before: before.char_count,
            chars_after: after.char_count,
        }
    }

    /// Fraction of documents surviving the stage; 1.0 for an empty input.
    pub fn frac_docs_retained(&self) -> f64 {
        if self.docs_before == 0 {
            1.0
        } else {
            self.docs_after as f64 / self.docs_before as f64
        }
    }

    pub fn frac_chars_retained(&self) -> f64 {
        if self.chars_before == 0 {
            1.0
        } else {
            self.chars_after as f64 / self.chars_before as f64
        }
    }

    /// Checks the shrink invariant on externally loaded deltas.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.docs_after > self.docs_before || self.chars_after > self.chars_before {
            return Err(CorpusError::MalformedRecord {
                line: 0,
                msg: format!("stage {} has after > before", self.stage_name),
            });
        }
        Ok(())
    }
}

/// Input format accepted by [`read_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    Jsonl,
    WikiXml,
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "wiki-xml" => Ok(CorpusFormat::WikiXml),
            other => Err(format!("unknown corpus format: {other}")),
        }
    }
}

/// Streams documents from `path` in file order.
///
/// Memory use is bounded by the largest single record; nothing is buffered
/// beyond the line (or XML page) being decoded.
pub fn read_corpus(
    path: &Path,
    format: CorpusFormat,
) -> Result<CorpusReader<BufReader<File>>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let reader = BufReader::new(file);
    Ok(match format {
        CorpusFormat::Jsonl => CorpusReader::Jsonl(JsonlReader::new(reader)),
        CorpusFormat::WikiXml => CorpusReader::WikiXml(WikiXmlReader::new(reader)),
    })
}

pub enum CorpusReader<R: BufRead> {
    Jsonl(JsonlReader<R>),
    WikiXml(WikiXmlReader<R>),
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            CorpusReader::Jsonl(r) => r.next(),
            CorpusReader::WikiXml(r) => r.next(),
        }
    }
}

/// Deserialization target that lets us report the first missing key by name.
#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    title: Option<String>,
    text: Option<String>,
    lang: Option<String>,
}

pub struct JsonlReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> JsonlReader<R> {
    pub fn new(reader: R) -> Self {
        JsonlReader {
            lines: reader.lines(),
            line_no: 0,
        }
    }

    fn parse_line(&self, line: &str) -> Result<Document, CorpusError> {
        let raw: RawRecord =
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedRecord {
                line: self.line_no,
                msg: e.to_string(),
            })?;
        let missing = |key| CorpusError::MissingKey {
            line: self.line_no,
            key,
        };
        let id = raw.id.ok_or_else(|| missing("id"))?;
        let text = raw.text.ok_or_else(|| missing("text"))?;
        let title = raw.title.ok_or_else(|| missing("title"))?;
        let lang = raw.lang.ok_or_else(|| missing("lang"))?;
        if id.is_empty() {
            return Err(CorpusError::EmptyId { line: self.line_no });
        }
        Ok(Document {
            id,
            title,
            text,
            lang,
        })
    }
}

impl<R: BufRead> Iterator for JsonlReader<R> {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => {
                    return Some(Err(CorpusError::MalformedRecord {
                        line: self.line_no + 1,
                        msg: e.to_string(),
                    }))
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(self.parse_line(&line));
        }
    }
}

/// Writes a corpus as JSONL, one record per line in input order.
///
/// Output goes through a temporary file renamed into place on success, so a
/// failed write never leaves a partial corpus behind.
pub fn write_corpus<I>(docs: I, path: &Path) -> Result<CorpusStats, CorpusError>
where
    I: IntoIterator<Item = Document>,
{
    let tmp = tmp_path(path);
    let result = write_corpus_inner(docs, &tmp);
    match result {
        Ok(stats) => {
            std::fs::rename(&tmp, path).map_err(|e| CorpusError::io(path, e))?;
            Ok(stats)
        }
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

fn write_corpus_inner<I>(docs: I, tmp: &Path) -> Result<CorpusStats, CorpusError>
where
    I: IntoIterator<Item = Document>,
{
    let file = File::create(tmp).map_err(|e| CorpusError::io(tmp, e))?;
    let mut out = BufWriter::new(file);
    let mut stats = CorpusStats::default();
    for doc in docs {
        let line = serde_json::to_string(&doc).map_err(|e| CorpusError::MalformedRecord {
            line: stats.doc_count as usize + 1,
            msg: e.to_string(),
        })?;
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CorpusError::io(tmp, e))?;
        stats.add(&doc);
    }
    out.flush().map_err(|e| CorpusError::io(tmp, e))?;
    Ok(stats)
}

/// Collects a whole corpus into memory, failing on the first bad record.
pub fn collect_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>, CorpusError> {
    read_corpus(path, format)?.collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.to_string(),
            title: format!("T{id}"),
            text: text.to_string(),
            lang: "yo".to_string(),
        }
    }

    #[test]
    fn jsonl_reads_two_lines_in_order() {
        let input = concat!(
            r#"{"id":"1","title":"a","text":"x","lang":"yo"}"#,
            "\n",
            r#"{"id":"2","title":"b","text":"y","lang":"yo"}"#,
            "\n",
        );
        let docs: Vec<_> = JsonlReader::new(input.as_bytes())
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "1");
        assert_eq!(docs[1].id, "2");
    }

    #[test]
    fn missing_text_names_the_key_and_line() {
        let err = JsonlReader::new(r#"{"id":"1"}"#.as_bytes())
            .next()
            .unwrap()
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("missing key: text"), "got: {msg}");
        assert!(msg.contains("line 1"), "got: {msg}");
    }

    #[test]
    fn malformed_json_names_the_line() {
        let input = "{\"id\":\"1\",\"title\":\"a\",\"text\":\"x\",\"lang\":\"yo\"}\nnot json\n";
        let results: Vec<_> = JsonlReader::new(input.as_bytes()).collect();
        assert!(results[0].is_ok());
        let msg = results[1].as_ref().unwrap_err().to_string();
        assert!(msg.contains("line 2"), "got: {msg}");
    }

    #[test]
    fn empty_id_rejected() {
        let err = JsonlReader::new(r#"{"id":"","title":"a","text":"x","lang":"yo"}"#.as_bytes())
            .next()
            .unwrap()
            .unwrap_err();
        assert!(err.to_string().contains("empty document id"));
    }

    #[test]
    fn write_then_read_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let docs: Vec<_> = (0..100).map(|i| doc(&i.to_string(), "body text")).collect();
        let stats = write_corpus(docs.clone(), &path).unwrap();
        assert_eq!(stats.doc_count, 100);
        let back = collect_corpus(&path, CorpusFormat::Jsonl).unwrap();
        assert_eq!(back, docs);
    }

    #[test]
    fn empty_corpus_writes_empty_file_with_zero_stats() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let stats = write_corpus(Vec::new(), &path).unwrap();
        assert_eq!(stats, CorpusStats::default());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
    }

    #[test]
    fn char_count_uses_scalar_values() {
        let stats = CorpusStats::from_docs([&doc("1", "ab"), &doc("2", "c")]);
        assert_eq!(stats.char_count, 3);
        // Multi-byte characters count once each.
        assert_eq!(doc("3", "অসম").char_count(), 3);
    }

    #[test]
    fn stage_delta_fractions() {
        let before = CorpusStats {
            doc_count: 1000,
            char_count: 1_000_000,
        };
        let after = CorpusStats {
            doc_count: 700,
            char_count: 900_000,
        };
        let delta = StageDelta::new("script_filter", before, after);
        assert!((delta.frac_docs_retained() - 0.7).abs() < 1e-12);
        assert!((delta.frac_chars_retained() - 0.9).abs() < 1e-12);
    }
}
