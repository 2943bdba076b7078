use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::Example;
use crate::wikidump::canonicalize_title;

#[derive(Debug, Error)]
#[error("cannot read blocklist {path}: {source}")]
pub struct BlocklistError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Order-insensitive key for an entity set: lowercased, sorted, tab-joined.
pub fn normalize_entity_set<S: AsRef<str>>(entities: &[S]) -> String {
    let mut parts: Vec<String> = entities
        .iter()
        .map(|e| e.as_ref().trim().to_lowercase())
        .filter(|e| !e.is_empty())
        .collect();
    parts.sort_unstable();
    parts.dedup();
    parts.join("\t")
}

/// Pages and entity sets to keep out of the corpus.
#[derive(Debug, Clone, Default)]
pub struct Blocklists {
    pages: HashSet<String>,
    entity_sets: HashSet<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DropTally {
    pub page: u64,
    pub entity_set: u64,
}

impl DropTally {
    pub fn total(&self) -> u64 {
        self.page + self.entity_set
    }

    pub fn add(&mut self, other: DropTally) {
        self.page += other.page;
        self.entity_set += other.entity_set;
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, BlocklistError> {
    let text = fs::read_to_string(path).map_err(|source| BlocklistError {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

impl Blocklists {
    pub fn from_lines<P, E>(pages: P, entity_sets: E) -> Blocklists
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        E: IntoIterator,
        E::Item: AsRef<str>,
    {
        Blocklists {
            pages: pages
                .into_iter()
                .map(|p| canonicalize_title(p.as_ref()))
                .filter(|p| !p.is_empty())
                .collect(),
            entity_sets: entity_sets
                .into_iter()
                .map(|line| {
                    let parts: Vec<&str> = line.as_ref().split('\t').collect();
                    normalize_entity_set(&parts)
                })
                .filter(|k| !k.is_empty())
                .collect(),
        }
    }

    /// Loads newline-delimited blocklist files. Missing paths mean empty lists.
    pub fn load(page_file: Option<&Path>, entity_set_file: Option<&Path>) -> Result<Blocklists, BlocklistError> {
        let pages = match page_file {
            Some(p) => read_lines(p)?,
            None => Vec::new(),
        };
        let sets = match entity_set_file {
            Some(p) => read_lines(p)?,
            None => Vec::new(),
        };
        Ok(Blocklists::from_lines(pages, sets))
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty() && self.entity_sets.is_empty()
    }

    pub fn blocks_page(&self, title: &str) -> bool {
        !self.pages.is_empty() && self.pages.contains(&canonicalize_title(title))
    }

    /// A set is blocked when either its surface names or its identifiers
    /// normalize to a blocked key.
    pub fn blocks_entities(&self, example: &Example) -> bool {
        !self.entity_sets.is_empty()
            && (self.entity_sets.contains(&normalize_entity_set(&example.entities))
                || self.entity_sets.contains(&normalize_entity_set(&example.entity_ids)))
    }

    /// Why `example` would be dropped, if at all.
    pub fn verdict(&self, example: &Example) -> Option<DropReason> {
        if self.blocks_page(&example.source_page) {
            Some(DropReason::Page)
        } else if self.blocks_entities(example) {
            Some(DropReason::EntitySet)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    Page,
    EntitySet,
}

/// Drops blocked examples and reports how many went for which reason. A
/// page block takes precedence when both apply.
pub fn apply_blocklists(examples: Vec<Example>, lists: &Blocklists) -> (Vec<Example>, DropTally) {
    let mut tally = DropTally::default();
    if lists.is_empty() {
        return (examples, tally);
    }
    let kept = examples
        .into_iter()
        .filter(|ex| match lists.verdict(ex) {
            Some(DropReason::Page) => {
                tally.page += 1;
                false
            }
            Some(DropReason::EntitySet) => {
                tally.entity_set += 1;
                false
            }
            None => true,
        })
        .collect();
    (kept, tally)
}
