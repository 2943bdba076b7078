use crate::wikidump::CleanPage;

use super::coref::{Coreference, PronounCoref};
use super::mention::{build_mention_map, surface_of, MentionMap};
use super::segment::{segment_sentences, Sentence};
use super::{Example, ExampleKind};

/// Only the leading sentences of a page are mined for examples.
pub const MAX_SENTENCES: usize = 5;

/// A mention found in a sentence: `sentence[start..end]` resolved to `entity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionMatch<'a> {
    pub start: usize,
    pub end: usize,
    pub entity: &'a str,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// True unless `pos` sits between two word characters.
fn at_boundary(text: &str, pos: usize) -> bool {
    if pos == 0 || pos >= text.len() {
        return true;
    }
    let before = text[..pos].chars().next_back();
    let after = text[pos..].chars().next();
    !matches!((before, after), (Some(b), Some(a)) if is_word_char(b) && is_word_char(a))
}

/// Scans `sentence` left to right for map entries, longest match first,
/// accepting only matches delimited by word boundaries. Matches never
/// overlap.
pub fn find_mentions<'m>(sentence: &str, map: &'m MentionMap) -> Vec<MentionMatch<'m>> {
    let mut found = Vec::new();
    let max_len = map.max_mention_len();
    let mut pos = 0;
    'scan: while pos < sentence.len() {
        let c = sentence[pos..].chars().next().unwrap_or(' ');
        if c.is_whitespace() || !at_boundary(sentence, pos) {
            pos += c.len_utf8();
            continue;
        }
        let mut end = (pos + max_len).min(sentence.len());
        while !sentence.is_char_boundary(end) {
            end -= 1;
        }
        while end > pos {
            let candidate = &sentence[pos..end];
            let last_ws = candidate.chars().next_back().is_some_and(char::is_whitespace);
            if !last_ws && at_boundary(sentence, end) {
                if let Some(entity) = map.lookup(candidate) {
                    found.push(MentionMatch {
                        start: pos,
                        end,
                        entity,
                    });
                    pos = end;
                    continue 'scan;
                }
            }
            end -= 1;
            while !sentence.is_char_boundary(end) {
                end -= 1;
            }
        }
        pos += c.len_utf8();
    }
    found
}

/// Builds the examples of one page from its (coreference-resolved)
/// sentences.
///
/// Always emits the singleton `{title} → sentence 0` example when there is a
/// sentence, its entity being the lowercased title without a parenthetical
/// disambiguator, and one multi-entity example for each of the first
/// [`MAX_SENTENCES`] sentences mentioning at least two distinct entities.
pub fn examples_from_sentences(title: &str, sentences: &[Sentence], map: &MentionMap) -> Vec<Example> {
    let Some(first) = sentences.first() else {
        return Vec::new();
    };
    let mut examples = vec![Example {
        entities: vec![surface_of(title).to_lowercase()],
        sentence: first.text.clone(),
        source_page: title.to_string(),
        sentence_index: 0,
        kind: ExampleKind::Definition,
        entity_ids: vec![title.to_string()],
    }];
    for sentence in sentences.iter().take(MAX_SENTENCES) {
        let mut entities = Vec::new();
        let mut entity_ids: Vec<String> = Vec::new();
        for m in find_mentions(&sentence.text, map) {
            if entity_ids.iter().any(|id| id == m.entity) {
                continue;
            }
            entities.push(sentence.text[m.start..m.end].to_string());
            entity_ids.push(m.entity.to_string());
        }
        // Single-entity sets are only kept as the definitional singleton.
        if entity_ids.len() < 2 {
            continue;
        }
        examples.push(Example {
            kind: ExampleKind::for_size(entities.len()),
            entities,
            entity_ids,
            sentence: sentence.text.clone(),
            source_page: title.to_string(),
            sentence_index: sentence.index,
        });
    }
    examples
}

/// Segments `page`, runs coreference, and extracts its examples using `map`.
pub fn extract_examples(page: &CleanPage, map: &MentionMap, coref: &dyn Coreference) -> Vec<Example> {
    let sentences = coref.resolve(segment_sentences(&page.plain_text), &page.title);
    examples_from_sentences(&page.title, &sentences, map)
}

/// Examples of one page plus the bookkeeping the pipeline reports.
#[derive(Debug, Clone, Default)]
pub struct PageExamples {
    pub examples: Vec<Example>,
    pub mention_collisions: usize,
}

/// Page → examples with a fixed coreference stage.
pub struct ExampleExtractor {
    coref: Box<dyn Coreference>,
}

impl Default for ExampleExtractor {
    fn default() -> Self {
        ExampleExtractor::new(Box::new(PronounCoref))
    }
}

impl ExampleExtractor {
    pub fn new(coref: Box<dyn Coreference>) -> Self {
        ExampleExtractor { coref }
    }

    pub fn coref_name(&self) -> &'static str {
        self.coref.name()
    }

    pub fn extract(&self, page: &CleanPage) -> PageExamples {
        let map = build_mention_map(page);
        PageExamples {
            examples: extract_examples(page, &map, self.coref.as_ref()),
            mention_collisions: map.collisions(),
        }
    }
}
