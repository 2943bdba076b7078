//! From clean pages to entity-set → sentence examples.
//!
//! Per page: segment the plain text into sentences, optionally substitute
//! pronouns via a [`Coreference`] stage, build the page-local
//! [`MentionMap`] from its links, then scan the first five sentences for
//! mentions. Sentence 0 always yields the definitional singleton example;
//! any of the first five sentences with two or more entities yields a
//! relation (2) or hyper-relation (≥3) example.

mod blocklist;
mod coref;
mod extract;
mod mention;
mod segment;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::jsonl::{self, JsonlError};

pub use blocklist::{apply_blocklists, normalize_entity_set, BlocklistError, Blocklists, DropReason, DropTally};
pub use coref::{coref_by_name, Coreference, IdentityCoref, PronounCoref};
pub use extract::{examples_from_sentences, extract_examples, find_mentions, ExampleExtractor, MentionMatch, PageExamples, MAX_SENTENCES};
pub use mention::{build_mention_map, MentionMap};
pub use segment::{segment_sentences, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Definition,
    Relation,
    Hyper,
}

impl ExampleKind {
    pub fn for_size(n: usize) -> ExampleKind {
        match n {
            0 | 1 => ExampleKind::Definition,
            2 => ExampleKind::Relation,
            _ => ExampleKind::Hyper,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleKind::Definition => "definition",
            ExampleKind::Relation => "relation",
            ExampleKind::Hyper => "hyper",
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One entity-set → sentence pair.
///
/// `entities` holds the surface names the model sees, in first-occurrence
/// order; `entity_ids` holds the canonical page title behind each of them,
/// index-aligned. Deduplication is by identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub entities: Vec<String>,
    pub sentence: String,
    pub source_page: String,
    pub sentence_index: u32,
    pub kind: ExampleKind,
    /// Missing in corpora that carry surface names only; [`read_corpus`]
    /// then fills it from `entities`.
    #[serde(default)]
    pub entity_ids: Vec<String>,
}

impl Example {
    /// Checks the structural invariants every emitted example must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        if self.entities.is_empty() {
            return Err("empty entity set".into());
        }
        if self.entities.len() != self.entity_ids.len() {
            return Err("entities and entity_ids differ in length".into());
        }
        if self.kind != ExampleKind::for_size(self.entities.len()) {
            return Err(format!(
                "kind {} does not match {} entities",
                self.kind,
                self.entities.len()
            ));
        }
        if self.entities.len() == 1 && self.sentence_index != 0 {
            return Err("singleton entity set outside the first sentence".into());
        }
        let mut ids: Vec<&str> = self.entity_ids.iter().map(String::as_str).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate entity".into());
        }
        Ok(())
    }
}

/// Reads a corpus JSONL file, checking every example's invariants.
pub fn read_corpus(path: &Path) -> Result<Vec<Example>, JsonlError> {
    jsonl::read_jsonl_checked(jsonl::open(path)?, path, |ex: &mut Example| {
        if ex.entity_ids.is_empty() {
            ex.entity_ids = ex.entities.clone();
        }
        ex.validate()
    })
}

pub fn write_corpus(path: &Path, examples: &[Example]) -> Result<(), JsonlError> {
    jsonl::write_jsonl_file(path, examples)
}
