//! Corpus I/O round-trip and streaming behavior.

use proptest::prelude::*;
use wikiclean::corpus::{
    collect_corpus, read_corpus, write_corpus, CorpusFormat, CorpusStats, Document,
};

fn arb_document(idx: usize) -> impl Strategy<Value = Document> {
    // Text draws from the full printable-unicode-ish space including
    // multi-byte scripts, newlines get escaped by JSON.
    (any::<String>(), "[a-zA-Z ]{0,30}", "[a-z]{2,3}").prop_map(move |(text, title, lang)| {
        Document {
            id: format!("doc{idx}"),
            title,
            text,
            lang,
        }
    })
}

fn arb_corpus() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(any::<usize>(), 0..40).prop_flat_map(|seeds| {
        seeds
            .into_iter()
            .enumerate()
            .map(|(i, _)| arb_document(i))
            .collect::<Vec<_>>()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_read_round_trips_field_for_field(docs in arb_corpus()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let stats = write_corpus(docs.clone(), &path).unwrap();
        prop_assert_eq!(stats.doc_count, docs.len() as u64);
        let back = collect_corpus(&path, CorpusFormat::Jsonl).unwrap();
        prop_assert_eq!(back, docs);
    }

    #[test]
    fn written_stats_match_recount(docs in arb_corpus()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let stats = write_corpus(docs.clone(), &path).unwrap();
        let recount = CorpusStats::from_docs(&collect_corpus(&path, CorpusFormat::Jsonl).unwrap());
        prop_assert_eq!(stats, recount);
    }
}

#[test]
fn large_file_streams_in_file_order() {
    // A corpus bigger than any reasonable buffer, consumed one record at a
    // time through the iterator without collecting.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.jsonl");
    let body = "word ".repeat(200);
    let docs = (0..20_000).map(|i| Document {
        id: i.to_string(),
        title: String::new(),
        text: body.clone(),
        lang: "yo".into(),
    });
    write_corpus(docs, &path).unwrap();
    assert!(std::fs::metadata(&path).unwrap().len() > 20_000_000);

    let mut count = 0u64;
    for (expected, item) in read_corpus(&path, CorpusFormat::Jsonl).unwrap().enumerate() {
        let doc = item.unwrap();
        assert_eq!(doc.id, expected.to_string(), "order preserved");
        count += 1;
    }
    assert_eq!(count, 20_000);
}

#[test]
fn wiki_xml_format_reads_through_read_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.xml");
    std::fs::write(
        &path,
        "<mediawiki xml:lang=\"yo\">\
         <page><title>A</title><ns>0</ns><id>1</id><revision><text>alpha</text></revision></page>\
         <page><title>T</title><ns>1</ns><id>2</id><revision><text>talk</text></revision></page>\
         <page><title>B</title><ns>0</ns><id>3</id><revision><text>beta</text></revision></page>\
         </mediawiki>",
    )
    .unwrap();
    let docs = collect_corpus(&path, CorpusFormat::WikiXml).unwrap();
    assert_eq!(docs.len(), 2);
    assert_eq!(docs[0].lang, "yo");
    assert_eq!(docs[1].id, "3");
}
