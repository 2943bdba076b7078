//! Entity-set → sentence corpus tooling.
//!
//! The crate turns a MediaWiki XML dump into examples that pair a set of
//! entities with a sentence mentioning them ([`wikidump`], [`corpus`]),
//! retrieves related sentences by entity overlap ([`retrieval`]), encodes
//! model inputs ([`encoding`]), scores generated text ([`metrics`]), and
//! ties the stages together ([`harness`], [`cli`]).

pub mod cli;
pub mod corpus;
pub mod encoding;
pub mod harness;
pub mod jsonl;
pub mod metrics;
pub mod retrieval;
pub mod wikidump;
