//! C interface to `ver-forge`.
//!
//! Every fallible function returns a [`VfStatus`]. On failure a message is
//! available from [`vf_last_error`] on the same thread until the next call.
//! Strings handed out by this library are owned by the caller and must be
//! released with [`vf_string_free`]; indexes with [`vf_index_free`].
//! Structured results are returned as UTF-8 JSON.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use serde_json::{json, Value};
use ver_forge::corpus::read_corpus;
use ver_forge::encoding::{decode_input, encode_input};
use ver_forge::metrics::{concept_coverage, evaluate, tokenize, EvalPair, Metric};
use ver_forge::retrieval::{build_index, IndexError, OverlapIndex, Query};
use ver_forge::wikidump::strip_wikitext;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Io = 4,
    Panic = 5,
}

/// An immutable overlap index. Queries may run from several threads at once.
pub struct VfIndex {
    inner: OverlapIndex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

struct Failure(VfStatus, String);

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure(VfStatus::InvalidInput, message.to_string())
    }
}

impl From<IndexError> for Failure {
    fn from(e: IndexError) -> Self {
        let status = match e {
            IndexError::Io(_) => VfStatus::Io,
            _ => VfStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, recording its error and turning panics into [`VfStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VfStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VfStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(VfStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(VfStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(VfStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Failure::input("result contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn string_list(json_text: &str, name: &str) -> Result<Vec<String>, Failure> {
    serde_json::from_str::<Vec<String>>(json_text).map_err(|e| Failure::input(format!("{name}: {e}")))
}

/// Version of this library, including the index format. Static; do not free.
#[no_mangle]
pub extern "C" fn vf_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (index format v1)\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failure on this thread, or an empty string. Valid
/// until the next library call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn vf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Strips wikitext. `*out_json` receives
/// `{"plain_text": ..., "anchors": [{"mention","target","start","end"}], "warnings": [...]}`.
///
/// # Safety
/// `markup` is a NUL-terminated string; `out_json` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_strip_wikitext(markup: *const c_char, out_json: *mut *mut c_char) -> VfStatus {
    guard(|| {
        let stripped = strip_wikitext(arg(markup, "markup")?);
        let value = json!({
            "plain_text": stripped.plain_text,
            "anchors": stripped.anchors,
            "warnings": stripped.warnings,
        });
        put_string(out_json, value.to_string())
    })
}

/// Encodes a model input. `entities_json` and `retrieved_json` are JSON
/// arrays of strings; `retrieved_json` may be null for no retrieval.
///
/// # Safety
/// Non-null pointers are NUL-terminated strings; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_encode_input(entities_json: *const c_char, retrieved_json: *const c_char, out: *mut *mut c_char) -> VfStatus {
    guard(|| {
        let entities = string_list(arg(entities_json, "entities_json")?, "entities_json")?;
        let retrieved = if retrieved_json.is_null() {
            Vec::new()
        } else {
            string_list(arg(retrieved_json, "retrieved_json")?, "retrieved_json")?
        };
        let s = encode_input(&entities, &retrieved).map_err(Failure::input)?;
        put_string(out, s)
    })
}

/// Splits an encoded input. `*out_json` receives
/// `{"entities": [...], "retrieved": [...]}`.
///
/// # Safety
/// `input` is a NUL-terminated string; `out_json` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_decode_input(input: *const c_char, out_json: *mut *mut c_char) -> VfStatus {
    guard(|| {
        let (entities, retrieved) = decode_input(arg(input, "input")?).map_err(Failure::input)?;
        put_string(out_json, json!({ "entities": entities, "retrieved": retrieved }).to_string())
    })
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn put_index(out: *mut *mut VfIndex, inner: OverlapIndex) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(VfStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(VfIndex { inner }));
    Ok(())
}

/// Loads an index file written by [`vf_index_save`] or the command line.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_index_load(path: *const c_char, out: *mut *mut VfIndex) -> VfStatus {
    guard(|| {
        let inner = OverlapIndex::load(Path::new(arg(path, "path")?))?;
        put_index(out, inner)
    })
}

/// Builds an index over a corpus JSONL file; ids are example positions.
///
/// # Safety
/// `corpus_path` is a NUL-terminated string; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_index_build(corpus_path: *const c_char, out: *mut *mut VfIndex) -> VfStatus {
    guard(|| {
        let examples = read_corpus(Path::new(arg(corpus_path, "corpus_path")?)).map_err(|e| {
            let status = if e.is_io() { VfStatus::Io } else { VfStatus::InvalidInput };
            Failure(status, e.to_string())
        })?;
        put_index(out, build_index(examples))
    })
}

/// # Safety
/// `index` is null or a live index from this library.
unsafe fn index_ref<'a>(index: *const VfIndex) -> Result<&'a OverlapIndex, Failure> {
    index
        .as_ref()
        .map(|i| &i.inner)
        .ok_or_else(|| Failure(VfStatus::NullArgument, "index is null".into()))
}

/// # Safety
/// `index` is a live index; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vf_index_save(index: *const VfIndex, path: *const c_char) -> VfStatus {
    guard(|| Ok(index_ref(index)?.save(Path::new(arg(path, "path")?))?))
}

/// # Safety
/// `index` is a live index; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_index_len(index: *const VfIndex, out: *mut usize) -> VfStatus {
    guard(|| {
        let len = index_ref(index)?.len();
        if out.is_null() {
            return Err(Failure(VfStatus::NullArgument, "output pointer is null".into()));
        }
        *out = len;
        Ok(())
    })
}

/// Top-`k` examples by entity overlap. `entities` is ";"-separated;
/// a negative `exclude` excludes nothing. `*out_json` receives
/// `[{"id", "overlap", "sentence"}, ...]` in rank order.
///
/// # Safety
/// `index` is a live index; `entities` is a NUL-terminated string; `out_json`
/// is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_index_query(index: *const VfIndex, entities: *const c_char, k: usize, exclude: i64, out_json: *mut *mut c_char) -> VfStatus {
    guard(|| {
        let idx = index_ref(index)?;
        let list: Vec<&str> = arg(entities, "entities")?
            .split(';')
            .map(str::trim)
            .filter(|e| !e.is_empty())
            .collect();
        let exclude = u32::try_from(exclude).ok();
        let hits = idx.query(&Query::top_k(&list, k, exclude));
        let ranked: Vec<Value> = hits
            .iter()
            .map(|h| {
                json!({
                    "id": h.id,
                    "overlap": h.overlap,
                    "sentence": idx.get(h.id).map(|e| e.sentence.as_str()),
                })
            })
            .collect();
        put_string(out_json, Value::Array(ranked).to_string())
    })
}

/// Releases an index. Null is ignored.
///
/// # Safety
/// `index` is null or a live index not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vf_index_free(index: *mut VfIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Scores a corpus. `pairs_json` is an array of
/// `{"hypothesis": str, "references": [str], "concepts": [str]?}`;
/// `metrics` is a comma-separated list such as `"bleu,rouge_l"` (null for
/// all but coverage). `*out_json` receives the score report.
///
/// # Safety
/// Non-null pointers are NUL-terminated strings; `out_json` is valid for
/// writing.
#[no_mangle]
pub unsafe extern "C" fn vf_evaluate(pairs_json: *const c_char, metrics: *const c_char, out_json: *mut *mut c_char) -> VfStatus {
    guard(|| {
        let wanted = if metrics.is_null() {
            vec![Metric::Bleu, Metric::RougeL, Metric::MeteorLite, Metric::Cider]
        } else {
            Metric::parse_list(arg(metrics, "metrics")?).map_err(Failure::input)?
        };
        let value: Value = serde_json::from_str(arg(pairs_json, "pairs_json")?).map_err(Failure::input)?;
        let items = value.as_array().ok_or_else(|| Failure::input("pairs_json must be an array"))?;
        let mut pairs = Vec::with_capacity(items.len());
        let mut concepts = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let hyp = item["hypothesis"]
                .as_str()
                .ok_or_else(|| Failure::input(format!("pair {i}: missing hypothesis")))?;
            let refs: Vec<String> = serde_json::from_value(item["references"].clone())
                .map_err(|e| Failure::input(format!("pair {i}: references: {e}")))?;
            pairs.push(EvalPair::from_text(hyp, &refs));
            if let Some(c) = item.get("concepts") {
                let c: Vec<String> =
                    serde_json::from_value(c.clone()).map_err(|e| Failure::input(format!("pair {i}: concepts: {e}")))?;
                concepts.push(c);
            }
        }
        let concepts = (concepts.len() == pairs.len()).then_some(concepts.as_slice());
        let report = evaluate(&pairs, concepts, &wanted).map_err(Failure::input)?;
        put_string(out_json, serde_json::to_string(&report).map_err(Failure::input)?)
    })
}

/// Fraction of the concepts in `concepts_json` (a JSON array of strings)
/// whose stems occur in `hypothesis`.
///
/// # Safety
/// Pointers are NUL-terminated strings; `out` is valid for writing.
#[no_mangle]
pub unsafe extern "C" fn vf_concept_coverage(concepts_json: *const c_char, hypothesis: *const c_char, out: *mut f64) -> VfStatus {
    guard(|| {
        let concepts = string_list(arg(concepts_json, "concepts_json")?, "concepts_json")?;
        let score = concept_coverage(&concepts, &tokenize(arg(hypothesis, "hypothesis")?)).map_err(Failure::input)?;
        if out.is_null() {
            return Err(Failure(VfStatus::NullArgument, "output pointer is null".into()));
        }
        *out = score;
        Ok(())
    })
}
