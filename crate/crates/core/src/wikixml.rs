//! Streaming extraction of articles from MediaWiki export XML.
//!
//! Yields one [`Document`] per namespace-0 `<page>`, carrying the raw
//! wikitext of the page's latest revision. Pages without revision text are
//! skipped and tallied; other namespaces (talk, project, ...) are counted
//! separately. Nothing outside the current page is buffered.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;

use crate::corpus::{CorpusError, Document};

pub struct WikiXmlReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    /// Element stack of local names, used to resolve text content.
    stack: Vec<String>,
    /// Language code from the root element's xml:lang, unless overridden.
    lang: Option<String>,
    lang_override: bool,
    pages_seen: u64,
    skipped_no_text: u64,
    skipped_namespace: u64,
    done: bool,
}

#[derive(Default)]
struct PageState {
    title: String,
    id: Option<String>,
    ns: Option<i64>,
    text: String,
    in_revision_text: bool,
}

impl<R: BufRead> WikiXmlReader<R> {
    pub fn new(source: R) -> Self {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().trim_text(false);
        WikiXmlReader {
            reader,
            buf: Vec::with_capacity(64 * 1024),
            stack: Vec::new(),
            lang: None,
            lang_override: false,
            pages_seen: 0,
            skipped_no_text: 0,
            skipped_namespace: 0,
            done: false,
        }
    }

    /// Forces the language code instead of reading `xml:lang` from the dump.
    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = Some(lang.into());
        self.lang_override = true;
        self
    }

    pub fn pages_seen(&self) -> u64 {
        self.pages_seen
    }

    /// Namespace-0 pages skipped because they had no revision text.
    pub fn skipped_no_text(&self) -> u64 {
        self.skipped_no_text
    }

    /// Pages excluded because they are not in the main namespace.
    pub fn skipped_namespace(&self) -> u64 {
        self.skipped_namespace
    }

    /// Parses one `<page>` subtree. Returns Ok(None) for pages that are not
    /// articles (wrong namespace or no revision text).
    fn read_page(&mut self) -> Result<Option<Document>, CorpusError> {
        self.pages_seen += 1;
        let mut page = PageState::default();
        let mut depth = 0usize;
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => return Err(xml_err(self.reader.buffer_position(), e)),
            };
            match event {
                Event::Start(e) => {
                    let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                    if name == "revision" {
                        // Latest revision wins when a dump carries several.
                        page.text.clear();
                    }
                    page.in_revision_text =
                        name == "text" && self.stack.last().map(String::as_str) == Some("revision");
                    self.stack.push(name);
                    depth += 1;
                }
                Event::Text(e) => {
                    let value = match e.unescape() {
                        Ok(v) => v,
                        Err(e) => return Err(xml_err(self.reader.buffer_position(), e)),
                    };
                    capture(&self.stack, &mut page, depth, &value);
                }
                Event::CData(e) => {
                    let value = String::from_utf8_lossy(e.as_ref()).into_owned();
                    capture(&self.stack, &mut page, depth, &value);
                }
                Event::End(_) => {
                    if depth == 0 {
                        // </page> itself.
                        return Ok(self.finish_page(page));
                    }
                    depth -= 1;
                    self.stack.pop();
                    page.in_revision_text = false;
                }
                Event::Eof => {
                    return Err(CorpusError::TruncatedXml {
                        offset: self.reader.buffer_position(),
                    })
                }
                _ => {}
            }
        }
    }

    fn finish_page(&mut self, page: PageState) -> Option<Document> {
        if page.ns.unwrap_or(0) != 0 {
            self.skipped_namespace += 1;
            return None;
        }
        if page.text.trim().is_empty() {
            self.skipped_no_text += 1;
            return None;
        }
        let id = page.id.unwrap_or_else(|| page.title.clone());
        Some(Document {
            id,
            title: page.title,
            text: page.text,
            lang: self.lang.clone().unwrap_or_default(),
        })
    }
}

/// Text-content routing for the elements we care about inside `<page>`.
fn capture(stack: &[String], page: &mut PageState, depth: usize, value: &str) {
    let top = stack.last().map(String::as_str);
    match (depth, top) {
        (1, Some("title")) => page.title.push_str(value),
        (1, Some("ns")) => {
            page.ns = value.trim().parse::<i64>().ok().or(page.ns);
        }
        // The first <id> directly under <page>; revision ids sit deeper.
        (1, Some("id")) => {
            if page.id.is_none() {
                let trimmed = value.trim();
                if !trimmed.is_empty() {
                    page.id = Some(trimmed.to_string());
                }
            }
        }
        (_, Some("text")) if page.in_revision_text => page.text.push_str(value),
        _ => {}
    }
}

fn xml_err(offset: u64, e: quick_xml::Error) -> CorpusError {
    CorpusError::Xml {
        offset,
        msg: e.to_string(),
    }
}

impl<R: BufRead> Iterator for WikiXmlReader<R> {
    type Item = Result<Document, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(xml_err(self.reader.buffer_position(), e)));
                }
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name();
                    if name.as_ref() == b"mediawiki" && !self.lang_override {
                        if let Ok(Some(attr)) = e.try_get_attribute("xml:lang") {
                            if let Ok(value) = attr.unescape_value() {
                                self.lang = Some(value.into_owned());
                            }
                        }
                    } else if name.as_ref() == b"page" {
                        match self.read_page() {
                            Ok(Some(doc)) => return Some(Ok(doc)),
                            Ok(None) => continue,
                            Err(e) => {
                                self.done = true;
                                return Some(Err(e));
                            }
                        }
                    }
                }
                Event::Eof => {
                    self.done = true;
                    return None;
                }
                _ => {}
            }
        }
    }
}
