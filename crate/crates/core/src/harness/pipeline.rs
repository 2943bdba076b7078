use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::config::PipelineConfig;
use super::stats::{corpus_stats, CorpusStats};
use crate::corpus::{apply_blocklists, coref_by_name, Blocklists, DropTally, Example, ExampleExtractor};
use crate::encoding::EncodedRecord;
use crate::retrieval::{augment, build_index, Augmented, OverlapIndex, RetrievalMode, FORMAT_VERSION, MAX_H};
use crate::wikidump::{stream_pages, CleanPage, RawPage, SkipTally, WarningKind};

/// Pages handed to the worker pool at once.
const PAGE_BATCH: usize = 512;
/// Examples sharing one RNG stream during augmentation. Fixed so the output
/// does not depend on the number of workers.
pub const AUGMENT_SHARD: usize = 1024;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const STATS_FILE: &str = "stats.json";
pub const INDEX_FILE: &str = "index.bin";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Blocklist,
    Dump,
    Retrieval,
    Encode,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Blocklist => "blocklist",
            Stage::Dump => "dump",
            Stage::Retrieval => "retrieval",
            Stage::Encode => "encode",
            Stage::Write => "write",
        })
    }
}

/// Whether a failure came from the file system or from the data itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Io,
    Data,
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: FailureKind,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    fn new<E>(stage: Stage, kind: FailureKind, source: E) -> PipelineError
    where
        E: Into<Box<dyn std::error::Error + Send + Sync>>,
    {
        PipelineError {
            stage,
            kind,
            source: source.into(),
        }
    }

    fn io<E>(stage: Stage, source: E) -> PipelineError
    where
        E: Into<Box<dyn std::error::Error + Send + Sync>>,
    {
        PipelineError::new(stage, FailureKind::Io, source)
    }
}

/// Everything the corpus stage produced, plus its tallies.
#[derive(Debug, Clone, Default)]
pub struct CorpusBuild {
    pub examples: Vec<Example>,
    /// Clean pages, kept only on request.
    pub pages: Vec<CleanPage>,
    pub page_counts: PageCounts,
    pub extracted: u64,
    pub dropped: DropTally,
    pub strip_warnings: BTreeMap<WarningKind, u64>,
    pub mention_collisions: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PageCounts {
    pub streamed: u64,
    pub kept: u64,
    pub skipped: SkipTally,
}

struct PageOutput {
    clean: Option<CleanPage>,
    examples: Vec<Example>,
    warnings: Vec<WarningKind>,
    collisions: usize,
}

fn process_page(page: &RawPage, extractor: &ExampleExtractor, keep_page: bool) -> PageOutput {
    let (clean, warnings) = CleanPage::from_raw(page);
    let extracted = extractor.extract(&clean);
    PageOutput {
        examples: extracted.examples,
        warnings: warnings.iter().map(|w| w.kind).collect(),
        collisions: extracted.mention_collisions,
        clean: keep_page.then_some(clean),
    }
}

/// Streams a dump, strips and extracts every article in parallel batches,
/// and applies the blocklists. Results are merged in dump order, so the
/// output is the same for any pool size.
pub fn build_corpus<R: BufRead>(
    source: R,
    extractor: &ExampleExtractor,
    blocklists: &Blocklists,
    keep_pages: bool,
) -> Result<CorpusBuild, crate::wikidump::DumpError> {
    let mut stream = stream_pages(source);
    let mut out = CorpusBuild::default();
    let mut batch: Vec<RawPage> = Vec::with_capacity(PAGE_BATCH);
    loop {
        let next = stream.next().transpose()?;
        let at_end = next.is_none();
        if let Some(page) = next {
            batch.push(page);
        }
        if batch.len() == PAGE_BATCH || (at_end && !batch.is_empty()) {
            let results: Vec<PageOutput> = batch
                .par_iter()
                .map(|p| process_page(p, extractor, keep_pages))
                .collect();
            out.page_counts.kept += batch.len() as u64;
            batch.clear();
            for r in results {
                out.extracted += r.examples.len() as u64;
                out.mention_collisions += r.collisions as u64;
                for kind in r.warnings {
                    *out.strip_warnings.entry(kind).or_insert(0) += 1;
                }
                let (kept, dropped) = apply_blocklists(r.examples, blocklists);
                out.dropped.add(dropped);
                out.examples.extend(kept);
                out.pages.extend(r.clean);
            }
        }
        if at_end {
            break;
        }
    }
    out.page_counts.streamed = stream.pages_seen();
    out.page_counts.skipped = stream.skipped();
    Ok(out)
}

/// Retrieves supporting sentences for every example of `examples`, whose ids
/// in `index` are their positions. Example `i` draws from the RNG stream of
/// shard `i / AUGMENT_SHARD`, seeded with `seed + shard`.
pub fn augment_corpus(examples: &[Example], index: &OverlapIndex, mode: RetrievalMode, seed: u64) -> Vec<Augmented> {
    examples
        .par_chunks(AUGMENT_SHARD)
        .enumerate()
        .flat_map_iter(|(shard, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(shard as u64));
            let base = shard * AUGMENT_SHARD;
            chunk
                .iter()
                .enumerate()
                .map(|(i, ex)| augment(ex, Some((base + i) as u32), index, mode, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Encodes every example. Examples whose entities cannot be encoded
/// losslessly are counted and left out.
pub fn encode_corpus(examples: &[Example], augmented: Option<&[Augmented]>) -> (Vec<EncodedRecord>, u64) {
    let encoded: Vec<Option<EncodedRecord>> = examples
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let (retrieved, h): (&[String], Option<u8>) = match augmented {
                Some(a) => (&a[i].retrieved, Some(a[i].result.h_used)),
                None => (&[], None),
            };
            EncodedRecord::from_example(ex, retrieved, h).ok()
        })
        .collect();
    let rejected = encoded.iter().filter(|r| r.is_none()).count() as u64;
    (encoded.into_iter().flatten().collect(), rejected)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestConfig {
    pub dump_path: String,
    pub page_blocklist: Option<String>,
    pub entityset_blocklist: Option<String>,
    pub coref_plugin: String,
    pub retrieval: bool,
    pub retrieval_mode: RetrievalMode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExampleCounts {
    pub extracted: u64,
    pub emitted: u64,
    pub filtered: DropTally,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RecordCounts {
    pub written: u64,
    pub rejected: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WarningCounts {
    pub strip: BTreeMap<WarningKind, u64>,
    pub mention_collisions: u64,
}

/// What a run read, produced and dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub index_format: u32,
    pub config: ManifestConfig,
    pub pages: PageCounts,
    pub examples: ExampleCounts,
    pub records: RecordCounts,
    /// Number of records per drawn retrieval budget, when retrieval is on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_used_histogram: Option<Vec<u64>>,
    pub warnings: WarningCounts,
    pub outputs: Vec<String>,
}

impl Manifest {
    /// Checks that every page and every example is accounted for.
    pub fn reconciles(&self) -> bool {
        self.pages.streamed == self.pages.kept + self.pages.skipped.total()
            && self.examples.extracted == self.examples.emitted + self.examples.filtered.total()
            && self.examples.emitted == self.records.written + self.records.rejected
    }
}

/// Writes `name` under `dir` with a `.partial` suffix and returns the final
/// and temporary paths.
fn write_partial(dir: &Path, name: &str, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(PathBuf, PathBuf), PipelineError> {
    let target = dir.join(name);
    let partial = dir.join(format!("{name}.partial"));
    let file = File::create(&partial).map_err(|e| PipelineError::io(Stage::Write, format!("{}: {e}", partial.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| PipelineError::io(Stage::Write, format!("{}: {e}", partial.display())))?;
    Ok((target, partial))
}

fn jsonl_to<T: Serialize>(items: &[T]) -> impl FnOnce(&mut dyn Write) -> std::io::Result<()> + '_ {
    move |w| {
        for item in items {
            serde_json::to_writer(&mut *w, item)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn json_to<T: Serialize>(value: &T) -> impl FnOnce(&mut dyn Write) -> std::io::Result<()> + '_ {
    move |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    }
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

/// Runs dump → corpus → optional retrieval → encoding and writes the
/// corpus, records, stats, manifest and (with retrieval) the index into
/// `cfg.out_dir`.
///
/// Files are first written with a `.partial` suffix and renamed only once
/// every stage succeeded. `jobs` bounds the worker pool; the output bytes do
/// not depend on it.
pub fn run_pipeline(cfg: &PipelineConfig, jobs: Option<usize>) -> Result<Manifest, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| PipelineError::new(Stage::Config, FailureKind::Data, e))?;
    pool.install(|| run_stages(cfg))
}

fn run_stages(cfg: &PipelineConfig) -> Result<Manifest, PipelineError> {
    let coref = coref_by_name(&cfg.coref_plugin).ok_or_else(|| {
        PipelineError::new(Stage::Config, FailureKind::Data, format!("unknown coref plugin {:?}", cfg.coref_plugin))
    })?;
    let extractor = ExampleExtractor::new(coref);
    let blocklists = Blocklists::load(cfg.page_blocklist.as_deref(), cfg.entityset_blocklist.as_deref())
        .map_err(|e| PipelineError::io(Stage::Blocklist, e))?;
    let dump = File::open(&cfg.dump_path)
        .map_err(|e| PipelineError::io(Stage::Dump, format!("{}: {e}", cfg.dump_path.display())))?;
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| PipelineError::io(Stage::Write, format!("{}: {e}", cfg.out_dir.display())))?;

    let build = build_corpus(BufReader::with_capacity(1 << 20, dump), &extractor, &blocklists, false)
        .map_err(|e| PipelineError::new(Stage::Dump, FailureKind::Data, e))?;
    let examples = build.examples;

    let mut pending = Vec::new();
    pending.push(write_partial(&cfg.out_dir, CORPUS_FILE, jsonl_to(&examples))?);

    let (augmented, index) = if cfg.retrieval {
        let index = build_index(examples.iter().cloned());
        let aug = augment_corpus(&examples, &index, cfg.retrieval_mode, cfg.seed);
        (Some(aug), Some(index))
    } else {
        (None, None)
    };
    let h_used_histogram = augmented.as_ref().map(|aug| {
        let mut hist = vec![0u64; usize::from(MAX_H) + 1];
        for a in aug {
            hist[usize::from(a.result.h_used)] += 1;
        }
        hist
    });

    let (records, rejected) = encode_corpus(&examples, augmented.as_deref());
    pending.push(write_partial(&cfg.out_dir, RECORDS_FILE, jsonl_to(&records))?);

    let stats: CorpusStats = corpus_stats(&examples);
    pending.push(write_partial(&cfg.out_dir, STATS_FILE, json_to(&stats))?);

    if let Some(index) = &index {
        pending.push(write_partial(&cfg.out_dir, INDEX_FILE, |w| {
            index.write_to(w).map_err(|e| match e {
                crate::retrieval::IndexError::Io(io) => io,
                other => std::io::Error::other(other.to_string()),
            })
        })?);
    }

    let mut outputs: Vec<String> = pending
        .iter()
        .map(|(t, _)| t.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    outputs.push(MANIFEST_FILE.to_string());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        index_format: FORMAT_VERSION,
        config: ManifestConfig {
            dump_path: display_path(&cfg.dump_path),
            page_blocklist: cfg.page_blocklist.as_deref().map(display_path),
            entityset_blocklist: cfg.entityset_blocklist.as_deref().map(display_path),
            coref_plugin: extractor.coref_name().to_string(),
            retrieval: cfg.retrieval,
            retrieval_mode: cfg.retrieval_mode,
            seed: cfg.seed,
        },
        pages: build.page_counts,
        examples: ExampleCounts {
            extracted: build.extracted,
            emitted: examples.len() as u64,
            filtered: build.dropped,
        },
        records: RecordCounts {
            written: records.len() as u64,
            rejected,
        },
        h_used_histogram,
        warnings: WarningCounts {
            strip: build.strip_warnings,
            mention_collisions: build.mention_collisions,
        },
        outputs,
    };
    if !manifest.reconciles() {
        return Err(PipelineError::new(Stage::Write, FailureKind::Data, "manifest counts do not reconcile"));
    }
    pending.push(write_partial(&cfg.out_dir, MANIFEST_FILE, json_to(&manifest))?);

    for (target, partial) in &pending {
        fs::rename(partial, target).map_err(|e| PipelineError::io(Stage::Write, format!("{}: {e}", target.display())))?;
    }
    Ok(manifest)
}
