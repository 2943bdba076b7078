use std::cmp::Reverse;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::persist::IndexError;
use super::ExampleId;
use crate::corpus::Example;

/// Index key for an entity: trimmed and lowercased.
pub fn entity_key(entity: &str) -> String {
    entity.trim().to_lowercase()
}

/// One retrieved example and the number of query entities it shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub id: ExampleId,
    pub overlap: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMode {
    /// Rank by overlap with the full query.
    #[default]
    TopK,
    /// Repeatedly pick the example covering the most not-yet-covered query
    /// entities; once everything is covered, start a new round.
    GreedyCoverage,
}

/// A retrieval request.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    pub entities: Vec<String>,
    pub k: usize,
    /// Never returned. Examples with the same sentence text are dropped too.
    pub exclude: Option<ExampleId>,
    /// `(source_page, sentence_index)` of the sentence the query is for.
    pub provenance: Option<(String, u32)>,
    /// Sentence text of the query target; identical sentences are dropped.
    pub exclude_text: Option<String>,
    pub mode: RetrievalMode,
}

impl Query {
    pub fn top_k<S: AsRef<str>>(entities: &[S], k: usize, exclude: Option<ExampleId>) -> Query {
        Query {
            entities: entities.iter().map(|e| e.as_ref().to_string()).collect(),
            k,
            exclude,
            ..Query::default()
        }
    }
}

/// Inverted index from entity key to the sorted ids of the examples
/// mentioning it. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapIndex {
    /// Slot → id, strictly ascending.
    pub(super) ids: Vec<ExampleId>,
    pub(super) examples: Vec<Example>,
    pub(super) postings: HashMap<String, Vec<ExampleId>>,
    /// Slot → id of the group of slots sharing the same sentence text.
    text_group: Vec<u32>,
}

/// Indexes `examples`, giving each its position as id.
pub fn build_index<I: IntoIterator<Item = Example>>(examples: I) -> OverlapIndex {
    let entries = examples
        .into_iter()
        .enumerate()
        .map(|(i, e)| (i as ExampleId, e));
    OverlapIndex::from_entries(entries).expect("positional ids are unique")
}

impl OverlapIndex {
    /// Indexes examples under caller-chosen ids. The result does not depend
    /// on the order of `entries`.
    pub fn from_entries<I>(entries: I) -> Result<OverlapIndex, IndexError>
    where
        I: IntoIterator<Item = (ExampleId, Example)>,
    {
        let mut entries: Vec<(ExampleId, Example)> = entries.into_iter().collect();
        entries.sort_unstable_by_key(|(id, _)| *id);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(IndexError::DuplicateId(w[0].0));
        }
        let (ids, examples): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let mut postings: HashMap<String, Vec<ExampleId>> = HashMap::new();
        for (&id, example) in ids.iter().zip(&examples) {
            for key in example_keys(example) {
                // Ids arrive ascending, so each list stays sorted.
                let list = postings.entry(key).or_default();
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
        }
        Ok(OverlapIndex::assemble(ids, examples, postings))
    }

    pub(super) fn assemble(
        ids: Vec<ExampleId>,
        examples: Vec<Example>,
        postings: HashMap<String, Vec<ExampleId>>,
    ) -> OverlapIndex {
        let mut groups: HashMap<&str, u32> = HashMap::new();
        let text_group = examples
            .iter()
            .map(|e| {
                let next = groups.len() as u32;
                *groups.entry(e.sentence.as_str()).or_insert(next)
            })
            .collect();
        OverlapIndex {
            ids,
            examples,
            postings,
            text_group,
        }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn entity_count(&self) -> usize {
        self.postings.len()
    }

    fn slot(&self, id: ExampleId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn get(&self, id: ExampleId) -> Option<&Example> {
        self.slot(id).map(|s| &self.examples[s])
    }

    pub fn postings(&self, entity: &str) -> &[ExampleId] {
        self.postings
            .get(&entity_key(entity))
            .map_or(&[], Vec::as_slice)
    }

    /// `(id, example)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (ExampleId, &Example)> {
        self.ids.iter().copied().zip(self.examples.iter())
    }

    /// Top-`k` examples sharing at least one entity with `entities`, ranked
    /// by overlap descending then id ascending.
    pub fn query_overlap<S: AsRef<str>>(&self, entities: &[S], k: usize, exclude: Option<ExampleId>) -> Vec<Hit> {
        self.query(&Query::top_k(entities, k, exclude))
    }

    pub fn query(&self, q: &Query) -> Vec<Hit> {
        if q.k == 0 {
            return Vec::new();
        }
        let mut keys: Vec<String> = q.entities.iter().map(|e| entity_key(e)).filter(|k| !k.is_empty()).collect();
        keys.sort_unstable();
        keys.dedup();

        let excluded_group = q
            .exclude
            .and_then(|id| self.slot(id))
            .map(|s| self.text_group[s]);
        let allowed = |slot: usize| -> bool {
            if Some(self.ids[slot]) == q.exclude || Some(self.text_group[slot]) == excluded_group {
                return false;
            }
            let ex = &self.examples[slot];
            if let Some((page, idx)) = &q.provenance {
                if ex.sentence_index == *idx && ex.source_page == *page {
                    return false;
                }
            }
            if let Some(text) = &q.exclude_text {
                if ex.sentence == *text {
                    return false;
                }
            }
            true
        };

        match q.mode {
            RetrievalMode::TopK => {
                let mut counts: HashMap<ExampleId, u32> = HashMap::new();
                for key in &keys {
                    if let Some(list) = self.postings.get(key) {
                        for &id in list {
                            *counts.entry(id).or_insert(0) += 1;
                        }
                    }
                }
                let mut hits: Vec<Hit> = counts
                    .into_iter()
                    .filter(|(id, _)| self.slot(*id).is_some_and(allowed))
                    .map(|(id, overlap)| Hit { id, overlap })
                    .collect();
                let rank = |h: &Hit| (Reverse(h.overlap), h.id);
                if hits.len() > q.k {
                    hits.select_nth_unstable_by_key(q.k - 1, rank);
                    hits.truncate(q.k);
                }
                hits.sort_unstable_by_key(rank);
                hits
            }
            RetrievalMode::GreedyCoverage => self.greedy(&keys, q.k, allowed),
        }
    }

    fn greedy(&self, keys: &[String], k: usize, allowed: impl Fn(usize) -> bool) -> Vec<Hit> {
        // Candidate id → bitmask of the query keys it contains.
        let mut masks: HashMap<ExampleId, u128> = HashMap::new();
        for (bit, key) in keys.iter().take(128).enumerate() {
            if let Some(list) = self.postings.get(key) {
                for &id in list {
                    *masks.entry(id).or_insert(0) |= 1u128 << bit;
                }
            }
        }
        let mut pool: Vec<(ExampleId, u128)> = masks
            .into_iter()
            .filter(|(id, _)| self.slot(*id).is_some_and(&allowed))
            .collect();
        pool.sort_unstable_by_key(|(id, _)| *id);

        let all: u128 = pool.iter().fold(0, |acc, (_, m)| acc | m);
        let mut uncovered = all;
        let mut out = Vec::new();
        while out.len() < k && !pool.is_empty() {
            if uncovered == 0 {
                uncovered = all;
            }
            let best = pool
                .iter()
                .enumerate()
                .max_by_key(|(_, (id, m))| ((m & uncovered).count_ones(), m.count_ones(), Reverse(*id)))
                .map(|(i, _)| i)
                .expect("pool is non-empty");
            let (id, mask) = pool.remove(best);
            uncovered &= !mask;
            out.push(Hit {
                id,
                overlap: mask.count_ones(),
            });
        }
        out
    }
}

/// Distinct index keys of an example.
pub(super) fn example_keys(example: &Example) -> Vec<String> {
    let mut keys: Vec<String> = example.entity_ids.iter().map(|e| entity_key(e)).filter(|k| !k.is_empty()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}
