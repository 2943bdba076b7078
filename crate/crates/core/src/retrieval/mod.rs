//! Entity-overlap retrieval over the example store.
//!
//! An [`OverlapIndex`] maps every entity to the sorted ids of the examples
//! mentioning it. Queries rank candidates by the number of query entities
//! they share, ties broken by ascending id, and never return the example the
//! query was made for. [`augment`] draws a retrieval budget `h` uniformly
//! from `0..=10` and attaches the top `h` sentences to an example.

mod index;
mod persist;

use rand::Rng;
use serde::Serialize;

use crate::corpus::Example;

pub use index::{build_index, entity_key, Hit, OverlapIndex, Query, RetrievalMode};
pub use persist::{IndexError, FORMAT_VERSION};

pub type ExampleId = u32;

/// Largest retrieval budget drawn by [`sample_h`].
pub const MAX_H: u8 = 10;

/// Draws a retrieval budget uniformly from `0..=MAX_H`.
pub fn sample_h<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.gen_range(0..=MAX_H)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetrievalResult {
    pub ranked: Vec<Hit>,
    pub h_used: u8,
}

/// An example together with the sentences retrieved for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmented {
    pub result: RetrievalResult,
    pub retrieved: Vec<String>,
}

/// Retrieves up to `h` supporting sentences for `example`, `h` drawn from
/// `rng`. `own_id` is the example's id in `index` when it is stored there;
/// the example's own sentence is excluded either way.
pub fn augment<R: Rng + ?Sized>(
    example: &Example,
    own_id: Option<ExampleId>,
    index: &OverlapIndex,
    mode: RetrievalMode,
    rng: &mut R,
) -> Augmented {
    let h = sample_h(rng);
    let query = Query {
        entities: example.entity_ids.clone(),
        k: usize::from(h),
        exclude: own_id,
        provenance: Some((example.source_page.clone(), example.sentence_index)),
        exclude_text: Some(example.sentence.clone()),
        mode,
    };
    let ranked = index.query(&query);
    let retrieved = ranked
        .iter()
        .filter_map(|hit| index.get(hit.id))
        .map(|ex| ex.sentence.clone())
        .collect();
    Augmented {
        result: RetrievalResult { ranked, h_used: h },
        retrieved,
    }
}
