//! Model input strings and the JSONL records that carry them.
//!
//! An input is the entity list joined with `"; "`, followed by each
//! retrieved sentence behind a literal `" [SEP] "`:
//!
//! ```text
//! carbon dioxide; water [SEP] first retrieved sentence [SEP] second one
//! ```
//!
//! Encoding refuses anything [`decode_input`] could not take apart again.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Example, ExampleKind};
use crate::jsonl::{self, JsonlError};

pub const ENTITY_SEP: &str = "; ";
pub const SENTENCE_SEP: &str = " [SEP] ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("entity list is empty")]
    NoEntities,
    #[error("empty entity at position {0}")]
    EmptyEntity(usize),
    #[error("entity {0:?} contains a reserved separator")]
    ReservedInEntity(String),
    #[error("retrieved sentence {0:?} contains a reserved separator")]
    ReservedInSentence(String),
    #[error("encoding of {0:?} would not decode back to its parts")]
    Ambiguous(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("empty entity segment {index} in {input:?}")]
    EmptyEntity { index: usize, input: String },
}

/// Builds the input string for `entities` and `retrieved`.
pub fn encode_input<S: AsRef<str>, T: AsRef<str>>(entities: &[S], retrieved: &[T]) -> Result<String, EncodeError> {
    if entities.is_empty() {
        return Err(EncodeError::NoEntities);
    }
    let mut out = String::new();
    for (i, e) in entities.iter().enumerate() {
        let e = e.as_ref();
        if e.is_empty() {
            return Err(EncodeError::EmptyEntity(i));
        }
        if e.contains(ENTITY_SEP) || e.contains(SENTENCE_SEP) {
            return Err(EncodeError::ReservedInEntity(e.to_string()));
        }
        if i > 0 {
            out.push_str(ENTITY_SEP);
        }
        out.push_str(e);
    }
    for s in retrieved {
        let s = s.as_ref();
        if s.contains(SENTENCE_SEP) {
            return Err(EncodeError::ReservedInSentence(s.to_string()));
        }
        out.push_str(SENTENCE_SEP);
        out.push_str(s);
    }
    // Separators can still form across a boundary, e.g. an entity ending in
    // " [SEP]" followed by a retrieved sentence. Checking the inverse catches
    // every such case at once.
    let lossless = decode_input(&out).is_ok_and(|(es, rs)| {
        es.len() == entities.len()
            && rs.len() == retrieved.len()
            && es.iter().zip(entities).all(|(a, b)| a == b.as_ref())
            && rs.iter().zip(retrieved).all(|(a, b)| a == b.as_ref())
    });
    if lossless {
        Ok(out)
    } else {
        Err(EncodeError::Ambiguous(out))
    }
}

/// Splits an input string back into entities and retrieved sentences.
pub fn decode_input(input: &str) -> Result<(Vec<String>, Vec<String>), DecodeError> {
    let mut parts = input.split(SENTENCE_SEP);
    let head = parts.next().unwrap_or_default();
    let retrieved: Vec<String> = parts.map(str::to_string).collect();
    let mut entities = Vec::new();
    for (index, seg) in head.split(ENTITY_SEP).enumerate() {
        if seg.is_empty() {
            return Err(DecodeError::EmptyEntity {
                index,
                input: input.to_string(),
            });
        }
        entities.push(seg.to_string());
    }
    Ok((entities, retrieved))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub source_page: String,
    pub sentence_index: u32,
    pub kind: ExampleKind,
    /// The retrieval budget drawn for this record; absent without retrieval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_used: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedRecord {
    pub input: String,
    pub target: String,
    pub meta: RecordMeta,
}

impl EncodedRecord {
    /// Encodes `example` with its surface entity names.
    pub fn from_example(example: &Example, retrieved: &[String], h_used: Option<u8>) -> Result<EncodedRecord, EncodeError> {
        Ok(EncodedRecord {
            input: encode_input(&example.entities, retrieved)?,
            target: example.sentence.clone(),
            meta: RecordMeta {
                source_page: example.source_page.clone(),
                sentence_index: example.sentence_index,
                kind: example.kind,
                h_used,
            },
        })
    }
}

pub fn write_records(path: &Path, records: &[EncodedRecord]) -> Result<(), JsonlError> {
    jsonl::write_jsonl_file(path, records)
}

pub fn read_records(path: &Path) -> Result<Vec<EncodedRecord>, JsonlError> {
    jsonl::read_jsonl_file(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONE: [&str; 0] = [];

    #[test]
    fn entity_join() {
        assert_eq!(
            encode_input(&["carbon dioxide", "water", "carbonic acid"], &NONE).unwrap(),
            "carbon dioxide; water; carbonic acid"
        );
        assert_eq!(encode_input(&["x"], &NONE).unwrap(), "x");
    }

    #[test]
    fn retrieved_sentences() {
        assert_eq!(encode_input(&["x"], &["s1", "s2"]).unwrap(), "x [SEP] s1 [SEP] s2");
    }

    #[test]
    fn decode_examples() {
        let (e, r) = decode_input("a; b [SEP] s").unwrap();
        assert_eq!(e, ["a", "b"]);
        assert_eq!(r, ["s"]);
        let (e, r) = decode_input("a").unwrap();
        assert_eq!(e, ["a"]);
        assert!(r.is_empty());
        assert!(matches!(decode_input("a; ; b"), Err(DecodeError::EmptyEntity { index: 1, .. })));
    }

    #[test]
    fn reserved_substrings_rejected() {
        assert!(matches!(encode_input(&["a; b"], &NONE), Err(EncodeError::ReservedInEntity(_))));
        assert!(matches!(encode_input(&["a"], &["x [SEP] y"]), Err(EncodeError::ReservedInSentence(_))));
        assert!(matches!(encode_input(&["a [SEP]"], &["[SEP] y"]), Err(EncodeError::Ambiguous(_))));
        assert!(matches!(encode_input::<&str, &str>(&[], &[]), Err(EncodeError::NoEntities)));
    }

    #[test]
    fn semicolons_without_space_survive() {
        let es = ["a;", " b", "c;"];
        let s = encode_input(&es, &["t;"]).unwrap();
        assert_eq!(decode_input(&s).unwrap(), (es.map(String::from).to_vec(), vec!["t;".to_string()]));
    }

    #[test]
    fn records_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let recs = vec![
            EncodedRecord {
                input: "a; b".into(),
                target: "A and b.".into(),
                meta: RecordMeta {
                    source_page: "A".into(),
                    sentence_index: 1,
                    kind: ExampleKind::Relation,
                    h_used: Some(3),
                },
            },
            EncodedRecord {
                input: "a".into(),
                target: "A is \"quoted\".".into(),
                meta: RecordMeta {
                    source_page: "A".into(),
                    sentence_index: 0,
                    kind: ExampleKind::Definition,
                    h_used: None,
                },
            },
        ];
        write_records(&path, &recs).unwrap();
        assert_eq!(read_records(&path).unwrap(), recs);
    }

    #[test]
    fn bad_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        std::fs::write(&path, "{\"input\":\"a\",\"target\":\"b\",\"meta\":{\"source_page\":\"p\",\"sentence_index\":0,\"kind\":\"definition\"}}\n{oops\n").unwrap();
        let err = read_records(&path).unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(err.to_string().contains(":2:"));
    }
}
