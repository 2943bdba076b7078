//! Newline-delimited JSON helpers shared by every on-disk artifact.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {message}")]
    Invalid {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl JsonlError {
    /// The 1-based line the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            JsonlError::Io { .. } => None,
            JsonlError::Parse { line, .. } | JsonlError::Invalid { line, .. } => Some(*line),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, JsonlError::Io { .. })
    }
}

/// Writes one compact JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(out: W, items: &[T]) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_jsonl_file<T: Serialize>(path: &Path, items: &[T]) -> Result<(), JsonlError> {
    let io_err = |source| JsonlError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_jsonl(file, items).map_err(io_err)
}

/// Parses a JSONL stream. Blank lines are skipped but still counted, so
/// reported line numbers match what an editor shows.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(input: R, path: &Path) -> Result<Vec<T>, JsonlError> {
    read_jsonl_checked(input, path, |_: &mut T| Ok(()))
}

/// Like [`read_jsonl`], running `check` on every parsed item. A rejection is
/// reported with the item's line number.
pub fn read_jsonl_checked<T, R, F>(input: R, path: &Path, mut check: F) -> Result<Vec<T>, JsonlError>
where
    T: DeserializeOwned,
    R: BufRead,
    F: FnMut(&mut T) -> Result<(), String>,
{
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| JsonlError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut item = serde_json::from_str(&line).map_err(|source| JsonlError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        check(&mut item).map_err(|message| JsonlError::Invalid {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_jsonl_file<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    read_jsonl(open(path)?, path)
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>, JsonlError> {
    File::open(path).map(BufReader::new).map_err(|source| JsonlError::Io {
        path: path.to_path_buf(),
        source,
    })
}
