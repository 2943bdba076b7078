mod common;

use std::io::BufReader;

use proptest::prelude::*;

use common::in_first_occurrence_order;
use ver_forge::corpus::{segment_sentences, ExampleExtractor, ExampleKind, MAX_SENTENCES};
use ver_forge::wikidump::{canonicalize_title, stream_pages, strip_wikitext, CleanPage, RawPage};

/// Fragments that combine into plausible and broken wikitext alike.
const FRAGMENTS: &[&str] = &[
    "[[", "]]", "|", "{{", "}}", "{|", "|}", "'''", "''", "<ref>", "</ref>", "<ref name=\"x\"/>", "<!--", "-->",
    "<nowiki>", "</nowiki>", "<br/>", "== ", " ==", "\n", "\n* ", "&amp;", "&lt;", "&#233;", "[http://x.org ",
    "]", "[", "File:", "Category:", "de:", "#", "The ", "It is ", "water", "Water", " and ", "carbon dioxide",
    ". ", "? ", "Dr. ", "U.S. ", "(", ")", "é", "水", " ", ",", "s",
];

fn wikitext() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(FRAGMENTS), 0..80).prop_map(|parts| parts.concat())
}

/// Markup with well-formed links to a small set of pages, so extraction
/// finds many multi-entity sentences.
fn article() -> impl Strategy<Value = String> {
    let link = prop::sample::select(&[
        "[[water]]", "[[Carbon dioxide]]", "[[carbonic acid|acid]]", "[[Earth]]", "[[ice]]s", "[[Sun|the Sun]]",
    ][..]);
    let word = prop::sample::select(&["It", "is", "the", "with", "Water", "water", "and", "forms", "ice", "Earth"][..]);
    let token = prop_oneof![2 => link.prop_map(str::to_string), 5 => word.prop_map(str::to_string)];
    let sentence = prop::collection::vec(token, 1..10).prop_map(|w| w.join(" ") + ".");
    prop::collection::vec(sentence, 1..9).prop_map(|s| format!("'''Water''' {}", s.join(" ")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn anchors_are_sorted_disjoint_slices(markup in wikitext()) {
        let out = strip_wikitext(&markup);
        for a in &out.anchors {
            prop_assert!(a.byte_start < a.byte_end);
            prop_assert_eq!(&out.plain_text[a.byte_start..a.byte_end], a.mention.as_str());
            prop_assert_eq!(canonicalize_title(&a.target), a.target.clone());
        }
        for w in out.anchors.windows(2) {
            prop_assert!(w[0].byte_end <= w[1].byte_start);
        }
    }

    #[test]
    fn stripping_never_panics(markup in ".*") {
        let out = strip_wikitext(&markup);
        for a in &out.anchors {
            prop_assert_eq!(&out.plain_text[a.byte_start..a.byte_end], a.mention.as_str());
        }
    }

    #[test]
    fn stripping_is_idempotent_on_plain_words(words in prop::collection::vec("[a-zA-Z0-9]{1,8}", 0..20)) {
        let text = words.join(" ");
        prop_assert_eq!(strip_wikitext(&text).plain_text, text);
    }

    #[test]
    fn sentences_tile_the_text(markup in wikitext()) {
        let text = strip_wikitext(&markup).plain_text;
        let sentences = segment_sentences(&text);
        let mut last_end = 0;
        for (i, s) in sentences.iter().enumerate() {
            prop_assert_eq!(s.index as usize, i);
            prop_assert!(last_end <= s.byte_start && s.byte_start <= s.byte_end && s.byte_end <= text.len());
            prop_assert_eq!(text[s.byte_start..s.byte_end].trim(), s.text.as_str());
            prop_assert!(!s.text.is_empty());
            last_end = s.byte_end;
        }
    }

    #[test]
    fn extracted_examples_hold_their_invariants(markup in article()) {
        let stripped = strip_wikitext(&markup);
        let page = CleanPage { title: "Water".into(), page_id: 1, plain_text: stripped.plain_text, anchors: stripped.anchors };
        let examples = ExampleExtractor::default().extract(&page).examples;
        prop_assert!(!examples.is_empty());
        prop_assert!(examples.len() <= 1 + MAX_SENTENCES);
        prop_assert_eq!(examples[0].kind, ExampleKind::Definition);
        prop_assert_eq!(examples[0].sentence_index, 0);
        for ex in &examples {
            prop_assert_eq!(ex.validate(), Ok(()));
            prop_assert!((ex.sentence_index as usize) < MAX_SENTENCES);
            prop_assert!(in_first_occurrence_order(ex), "out of order: {:?}", ex);
        }
        for ex in &examples[1..] {
            prop_assert!(ex.entities.len() >= 2);
        }
    }

    #[test]
    fn dump_reader_never_panics(body in prop::collection::vec(prop::sample::select(&[
        "<page>", "</page>", "<title>", "</title>", "T", "<ns>", "</ns>", "0", "1", "<id>", "</id>", "7",
        "<text>", "</text>", "<text/>", "<redirect title=\"X\"/>", "<revision>", "</revision>", "&amp;", "&bogus;", "<", ">", "x",
    ][..]), 0..40)) {
        let xml = format!("<mediawiki>{}</mediawiki>", body.concat());
        for page in stream_pages(BufReader::new(xml.as_bytes())) {
            match page {
                Ok(RawPage { namespace, .. }) => prop_assert_eq!(namespace, 0),
                Err(_) => break,
            }
        }
    }
}
