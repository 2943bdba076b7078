//! Single-file index format.
//!
//! Layout, all integers little-endian, strings as `u32` length + UTF-8:
//!
//! ```text
//! magic "VERFIDX\0" | version u32 | n_examples u32 | n_entities u32
//! n_examples × { id u32, source_page str, sentence_index u32, kind u8,
//!                sentence str, n u32, n × { entity str, entity_id str } }
//! n_entities × { key str, n u32, n × id u32 }     (keys ascending)
//! checksum u64                                    (FNV-1a of all previous bytes)
//! ```
//!
//! Entity keys are written sorted and examples by ascending id, so saving a
//! loaded index reproduces the file byte for byte.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::index::{example_keys, OverlapIndex};
use super::ExampleId;
use crate::corpus::{Example, ExampleKind};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"VERFIDX\0";

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("index I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("index checksum mismatch")]
    Checksum,
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error("duplicate example id {0}")]
    DuplicateId(ExampleId),
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

struct Hashing<W> {
    inner: W,
    hash: u64,
}

impl<W> Hashing<W> {
    fn new(inner: W) -> Self {
        Hashing { inner, hash: FNV_OFFSET }
    }

    fn feed(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.hash ^= u64::from(b);
            self.hash = self.hash.wrapping_mul(FNV_PRIME);
        }
    }
}

impl<W: Write> Write for Hashing<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.feed(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

impl<R: Read> Read for Hashing<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.feed(&buf[..n]);
        Ok(n)
    }
}

fn put_u32<W: Write>(w: &mut W, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_str<W: Write>(w: &mut W, s: &str) -> io::Result<()> {
    let len = u32::try_from(s.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "string too long"))?;
    put_u32(w, len)?;
    w.write_all(s.as_bytes())
}

fn len_u32(n: usize, what: &str) -> Result<u32, IndexError> {
    u32::try_from(n).map_err(|_| IndexError::Corrupt(format!("too many {what}")))
}

fn kind_code(kind: ExampleKind) -> u8 {
    match kind {
        ExampleKind::Definition => 0,
        ExampleKind::Relation => 1,
        ExampleKind::Hyper => 2,
    }
}

fn get_u8<R: Read>(r: &mut R) -> Result<u8, IndexError> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(b[0])
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32, IndexError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn get_str<R: Read>(r: &mut R) -> Result<String, IndexError> {
    let len = get_u32(r)? as usize;
    let mut buf = Vec::new();
    r.by_ref().take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(IndexError::Corrupt("truncated string".into()));
    }
    String::from_utf8(buf).map_err(|_| IndexError::Corrupt("invalid UTF-8".into()))
}

fn truncated(e: io::Error) -> IndexError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        IndexError::Corrupt("unexpected end of file".into())
    } else {
        IndexError::Io(e)
    }
}

impl OverlapIndex {
    pub fn write_to<W: Write>(&self, out: W) -> Result<(), IndexError> {
        let mut w = Hashing::new(out);
        w.write_all(MAGIC)?;
        put_u32(&mut w, FORMAT_VERSION)?;
        put_u32(&mut w, len_u32(self.examples.len(), "examples")?)?;
        put_u32(&mut w, len_u32(self.postings.len(), "entities")?)?;
        for (id, ex) in self.iter() {
            put_u32(&mut w, id)?;
            put_str(&mut w, &ex.source_page)?;
            put_u32(&mut w, ex.sentence_index)?;
            w.write_all(&[kind_code(ex.kind)])?;
            put_str(&mut w, &ex.sentence)?;
            put_u32(&mut w, len_u32(ex.entities.len(), "entities")?)?;
            for (surface, id) in ex.entities.iter().zip(&ex.entity_ids) {
                put_str(&mut w, surface)?;
                put_str(&mut w, id)?;
            }
        }
        let mut keys: Vec<&String> = self.postings.keys().collect();
        keys.sort_unstable();
        for key in keys {
            let list = &self.postings[key];
            put_str(&mut w, key)?;
            put_u32(&mut w, len_u32(list.len(), "postings")?)?;
            for &id in list {
                put_u32(&mut w, id)?;
            }
        }
        let sum = w.hash;
        w.inner.write_all(&sum.to_le_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<OverlapIndex, IndexError> {
        let mut r = Hashing::new(input);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| IndexError::BadMagic)?;
        if &magic != MAGIC {
            return Err(IndexError::BadMagic);
        }
        let version = get_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(IndexError::Version { found: version });
        }
        let n_examples = get_u32(&mut r)? as usize;
        let n_entities = get_u32(&mut r)? as usize;

        let mut ids = Vec::with_capacity(n_examples.min(1 << 20));
        let mut examples = Vec::with_capacity(n_examples.min(1 << 20));
        for _ in 0..n_examples {
            let id = get_u32(&mut r)?;
            if ids.last().is_some_and(|&prev| prev >= id) {
                return Err(IndexError::Corrupt(format!("example ids not ascending at {id}")));
            }
            let source_page = get_str(&mut r)?;
            let sentence_index = get_u32(&mut r)?;
            let kind = match get_u8(&mut r)? {
                0 => ExampleKind::Definition,
                1 => ExampleKind::Relation,
                2 => ExampleKind::Hyper,
                k => return Err(IndexError::Corrupt(format!("unknown example kind {k}"))),
            };
            let sentence = get_str(&mut r)?;
            let n = get_u32(&mut r)? as usize;
            let mut entities = Vec::with_capacity(n.min(1024));
            let mut entity_ids = Vec::with_capacity(n.min(1024));
            for _ in 0..n {
                entities.push(get_str(&mut r)?);
                entity_ids.push(get_str(&mut r)?);
            }
            ids.push(id);
            examples.push(Example {
                entities,
                sentence,
                source_page,
                sentence_index,
                kind,
                entity_ids,
            });
        }

        let mut postings: HashMap<String, Vec<ExampleId>> = HashMap::with_capacity(n_entities.min(1 << 20));
        let mut prev_key: Option<String> = None;
        for _ in 0..n_entities {
            let key = get_str(&mut r)?;
            if prev_key.as_ref().is_some_and(|p| *p >= key) {
                return Err(IndexError::Corrupt(format!("entity dictionary not sorted at {key:?}")));
            }
            let n = get_u32(&mut r)? as usize;
            let mut list = Vec::with_capacity(n.min(1 << 20));
            for _ in 0..n {
                let id = get_u32(&mut r)?;
                if list.last().is_some_and(|&p| p >= id) {
                    return Err(IndexError::Corrupt(format!("posting list for {key:?} not ascending")));
                }
                if ids.binary_search(&id).is_err() {
                    return Err(IndexError::Corrupt(format!("posting for {key:?} names unknown id {id}")));
                }
                list.push(id);
            }
            prev_key = Some(key.clone());
            postings.insert(key, list);
        }

        let expected = r.hash;
        let mut tail = [0u8; 8];
        r.inner.read_exact(&mut tail).map_err(truncated)?;
        if u64::from_le_bytes(tail) != expected {
            return Err(IndexError::Checksum);
        }
        let mut extra = [0u8; 1];
        if r.inner.read(&mut extra)? != 0 {
            return Err(IndexError::Corrupt("trailing bytes after checksum".into()));
        }

        // Postings must be exactly what the stored examples imply.
        let mut derived: HashMap<String, Vec<ExampleId>> = HashMap::new();
        for (&id, ex) in ids.iter().zip(&examples) {
            for key in example_keys(ex) {
                derived.entry(key).or_default().push(id);
            }
        }
        if derived != postings {
            return Err(IndexError::Corrupt("postings disagree with stored examples".into()));
        }
        Ok(OverlapIndex::assemble(ids, examples, postings))
    }

    pub fn save(&self, path: &Path) -> Result<(), IndexError> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.into_inner().map_err(|e| IndexError::Io(e.into_error()))?.sync_all()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<OverlapIndex, IndexError> {
        OverlapIndex::read_from(BufReader::new(File::open(path)?))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }
}
