//! The `ver-forge` command line.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 usage error, 2 bad input data, 3 I/O failure.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::corpus::{coref_by_name, read_corpus, write_corpus, Blocklists, Example, ExampleExtractor};
use crate::encoding::{write_records, EncodedRecord};
use crate::harness::{
    augment_corpus, build_corpus, corpus_stats, run_pipeline, sample_low_resource, FailureKind, PipelineConfig,
    SampleSpec,
};
use crate::jsonl::{self, JsonlError};
use crate::metrics::{evaluate, EvalPair, Metric};
use crate::retrieval::{build_index, IndexError, OverlapIndex, Query, RetrievalMode};

/// Kept in step with [`crate::retrieval::FORMAT_VERSION`] by a unit test.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (index format v1)");

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ver-forge", version = VERSION, about = "Entity-set to sentence corpus construction, retrieval, encoding and evaluation")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of cores. Output does not
    /// depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stream a dump and write the example corpus.
    Build(BuildArgs),
    /// Entity-set size histogram of a corpus.
    Stats(StatsArgs),
    /// Rank stored examples by entity overlap.
    Retrieve(RetrieveArgs),
    /// Turn a corpus into model input/target records.
    Encode(EncodeArgs),
    /// Draw a low-resource subset of a corpus.
    Sample(SampleArgs),
    /// Score hypotheses against references.
    Eval(EvalArgs),
    /// Run the whole pipeline from a config file.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// MediaWiki XML export, uncompressed; "-" reads stdin.
    #[arg(long)]
    pub dump: PathBuf,
    /// Corpus JSONL output.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the stripped pages as JSONL.
    #[arg(long)]
    pub pages_out: Option<PathBuf>,
    /// Also build and save an overlap index over the corpus.
    #[arg(long)]
    pub index_out: Option<PathBuf>,
    #[arg(long)]
    pub page_blocklist: Option<PathBuf>,
    #[arg(long)]
    pub entityset_blocklist: Option<PathBuf>,
    /// Coreference stage: "pronoun" or "none".
    #[arg(long, default_value = "pronoun")]
    pub coref: String,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Write the statistics as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Bar width of the text histogram.
    #[arg(long, default_value_t = 40)]
    pub width: usize,
}

#[derive(Debug, Args)]
pub struct IndexSource {
    /// Saved index file.
    #[arg(long, conflicts_with = "corpus")]
    pub index: Option<PathBuf>,
    /// Corpus JSONL to index on the fly (ids are line positions).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[command(flatten)]
    pub source: IndexSource,
    /// Query entities separated by ";".
    #[arg(long)]
    pub entities: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Example id never to return.
    #[arg(long)]
    pub exclude: Option<u32>,
    /// Use greedy coverage instead of plain top-k.
    #[arg(long)]
    pub greedy: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Records JSONL output.
    #[arg(long)]
    pub out: PathBuf,
    /// Attach sentences retrieved from the corpus itself.
    #[arg(long, conflicts_with = "retrieved")]
    pub retrieval: bool,
    #[arg(long, requires = "retrieval")]
    pub greedy: bool,
    /// Externally retrieved sentences: line i holds the tab-separated
    /// sentences for example i.
    #[arg(long)]
    pub retrieved: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// "10%", a fraction such as "0.1", or a count such as "500".
    #[arg(long)]
    pub spec: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// One hypothesis per line.
    #[arg(long)]
    pub hyp: PathBuf,
    /// One JSON value per line: a reference string, a list of references,
    /// or an object with "references" (or "reference") and "concepts".
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, default_value = "bleu,rouge_l,meteor_lite,cider")]
    pub metrics: String,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn data(message: impl ToString) -> CliError {
        CliError {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }

    fn io(message: impl ToString) -> CliError {
        CliError {
            code: EXIT_IO,
            message: message.to_string(),
        }
    }
}

impl From<JsonlError> for CliError {
    fn from(e: JsonlError) -> Self {
        if e.is_io() {
            CliError::io(e)
        } else {
            CliError::data(e)
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Io(_) => CliError::io(e),
            _ => CliError::data(e),
        }
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::io(format!("{}: {e}", path.display()))
}

/// Parses `args`, runs the command, and reports failures on stderr.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ver-forge: {}", e.message.lines().collect::<Vec<_>>().join(" "));
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(0);
    if let Some(n) = cli.jobs {
        // Fails only if the global pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Build(a) => build(a),
        Command::Stats(a) => stats(a, &mut out),
        Command::Retrieve(a) => retrieve(a, &mut out),
        Command::Encode(a) => encode(a, seed),
        Command::Sample(a) => sample(a, seed, &mut out),
        Command::Eval(a) => eval(a, &mut out),
        Command::Pipeline(a) => pipeline(a, cli.seed, cli.jobs),
    }
}

fn build(a: BuildArgs) -> Result<(), CliError> {
    let coref = coref_by_name(&a.coref).ok_or_else(|| CliError {
        code: EXIT_USAGE,
        message: format!("unknown coreference stage {:?}", a.coref),
    })?;
    let extractor = ExampleExtractor::new(coref);
    let lists = Blocklists::load(a.page_blocklist.as_deref(), a.entityset_blocklist.as_deref()).map_err(CliError::io)?;
    let reader: Box<dyn BufRead> = if a.dump.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::with_capacity(1 << 20, File::open(&a.dump).map_err(io_at(&a.dump))?))
    };
    let built = build_corpus(reader, &extractor, &lists, a.pages_out.is_some()).map_err(CliError::data)?;
    write_corpus(&a.out, &built.examples)?;
    if let Some(p) = &a.pages_out {
        jsonl::write_jsonl_file(p, &built.pages)?;
    }
    if let Some(p) = &a.index_out {
        build_index(built.examples.iter().cloned()).save(p)?;
    }
    eprintln!(
        "pages: {} streamed, {} kept, {} skipped; examples: {} extracted, {} written, {} filtered",
        built.page_counts.streamed,
        built.page_counts.kept,
        built.page_counts.skipped.total(),
        built.extracted,
        built.examples.len(),
        built.dropped.total()
    );
    Ok(())
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let examples = read_corpus(&a.corpus)?;
    let s = corpus_stats(&examples);
    out.write_all(s.render_histogram(a.width).as_bytes()).map_err(CliError::io)?;
    if let Some(p) = &a.json {
        let text = serde_json::to_string_pretty(&s).map_err(CliError::data)?;
        fs::write(p, text + "\n").map_err(io_at(p))?;
    }
    Ok(())
}

fn load_index(src: &IndexSource) -> Result<OverlapIndex, CliError> {
    match (&src.index, &src.corpus) {
        (Some(p), _) => Ok(OverlapIndex::load(p).map_err(|e| match e {
            IndexError::Io(io) => CliError::io(format!("{}: {io}", p.display())),
            other => CliError::data(format!("{}: {other}", p.display())),
        })?),
        (None, Some(p)) => Ok(build_index(read_corpus(p)?)),
        (None, None) => Err(CliError {
            code: EXIT_USAGE,
            message: "one of --index or --corpus is required".into(),
        }),
    }
}

/// Splits a ";"-separated entity list, trimming each entry.
pub fn parse_entity_list(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|e| !e.is_empty()).map(str::to_string).collect()
}

#[derive(Serialize)]
struct RankedOut<'a> {
    id: u32,
    overlap: u32,
    sentence: &'a str,
    source_page: &'a str,
    sentence_index: u32,
}

#[derive(Serialize)]
struct RetrieveOut<'a> {
    entities: Vec<String>,
    k: usize,
    exclude: Option<u32>,
    ranked: Vec<RankedOut<'a>>,
}

fn retrieve(a: RetrieveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let index = load_index(&a.source)?;
    let entities = parse_entity_list(&a.entities);
    let query = Query {
        mode: if a.greedy { RetrievalMode::GreedyCoverage } else { RetrievalMode::TopK },
        ..Query::top_k(&entities, a.k, a.exclude)
    };
    let hits = index.query(&query);
    let ranked = hits
        .iter()
        .filter_map(|h| {
            index.get(h.id).map(|ex| RankedOut {
                id: h.id,
                overlap: h.overlap,
                sentence: &ex.sentence,
                source_page: &ex.source_page,
                sentence_index: ex.sentence_index,
            })
        })
        .collect();
    let report = RetrieveOut {
        entities,
        k: a.k,
        exclude: a.exclude,
        ranked,
    };
    serde_json::to_writer(&mut *out, &report).map_err(CliError::data)?;
    writeln!(out).map_err(CliError::io)
}

fn encode(a: EncodeArgs, seed: u64) -> Result<(), CliError> {
    let examples = read_corpus(&a.corpus)?;
    let mut rejected = 0u64;
    let mut records = Vec::with_capacity(examples.len());
    let mut push = |r: Result<EncodedRecord, _>, ex: &Example| match r {
        Ok(rec) => records.push(rec),
        Err(e) => {
            rejected += 1;
            eprintln!("skipping example from {:?}: {e}", ex.source_page);
        }
    };
    if a.retrieval {
        let index = build_index(examples.iter().cloned());
        let mode = if a.greedy { RetrievalMode::GreedyCoverage } else { RetrievalMode::TopK };
        let aug = augment_corpus(&examples, &index, mode, seed);
        for (ex, ag) in examples.iter().zip(&aug) {
            push(EncodedRecord::from_example(ex, &ag.retrieved, Some(ag.result.h_used)), ex);
        }
    } else if let Some(p) = &a.retrieved {
        let text = fs::read_to_string(p).map_err(io_at(p))?;
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != examples.len() {
            return Err(CliError::data(format!(
                "{}: {} lines for {} examples",
                p.display(),
                lines.len(),
                examples.len()
            )));
        }
        for (ex, line) in examples.iter().zip(lines) {
            let sents: Vec<String> = line.split('\t').filter(|s| !s.is_empty()).map(str::to_string).collect();
            let h = u8::try_from(sents.len()).ok();
            push(EncodedRecord::from_example(ex, &sents, h), ex);
        }
    } else {
        for ex in &examples {
            push(EncodedRecord::from_example(ex, &[], None), ex);
        }
    }
    write_records(&a.out, &records)?;
    eprintln!("{} records written, {} rejected", records.len(), rejected);
    Ok(())
}

fn sample(a: SampleArgs, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let spec: SampleSpec = a.spec.parse().map_err(|e| CliError {
        code: EXIT_USAGE,
        message: format!("{e}"),
    })?;
    let examples = read_corpus(&a.corpus)?;
    let picked = sample_low_resource(&examples, spec, seed).map_err(CliError::data)?;
    match &a.out {
        Some(p) => write_corpus(p, &picked)?,
        None => jsonl::write_jsonl(out, &picked).map_err(CliError::io)?,
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RefLine {
    One(String),
    Many(Vec<String>),
    Full {
        #[serde(default)]
        references: Vec<String>,
        #[serde(default)]
        reference: Option<String>,
        #[serde(default)]
        concepts: Option<Vec<String>>,
    },
}

impl RefLine {
    fn split(self) -> (Vec<String>, Option<Vec<String>>) {
        match self {
            RefLine::One(r) => (vec![r], None),
            RefLine::Many(rs) => (rs, None),
            RefLine::Full {
                mut references,
                reference,
                concepts,
            } => {
                references.extend(reference);
                (references, concepts)
            }
        }
    }
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let metrics = Metric::parse_list(&a.metrics).map_err(|e| CliError {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;
    let hyp_text = fs::read_to_string(&a.hyp).map_err(io_at(&a.hyp))?;
    let refs: Vec<RefLine> = jsonl::read_jsonl_checked(jsonl::open(&a.reference)?, &a.reference, |r: &mut RefLine| {
        match r {
            RefLine::Full {
                references, reference, ..
            } if references.is_empty() && reference.is_none() => Err("no references".into()),
            RefLine::Many(rs) if rs.is_empty() => Err("no references".into()),
            _ => Ok(()),
        }
    })?;
    let hyps: Vec<&str> = hyp_text.lines().collect();
    if hyps.len() != refs.len() {
        return Err(CliError::data(format!(
            "{} hypotheses but {} reference lines",
            hyps.len(),
            refs.len()
        )));
    }
    let mut pairs = Vec::with_capacity(hyps.len());
    let mut concepts = Vec::with_capacity(hyps.len());
    let mut all_concepts = true;
    for (h, r) in hyps.into_iter().zip(refs) {
        let (references, c) = r.split();
        pairs.push(EvalPair::from_text(h, &references));
        match c {
            Some(c) => concepts.push(c),
            None => all_concepts = false,
        }
    }
    if metrics.contains(&Metric::Coverage) && !all_concepts {
        return Err(CliError::data("coverage needs \"concepts\" on every reference line"));
    }
    let concepts = all_concepts.then_some(concepts.as_slice());
    let report = evaluate(&pairs, concepts, &metrics).map_err(CliError::data)?;
    serde_json::to_writer(&mut *out, &report).map_err(CliError::data)?;
    writeln!(out).map_err(CliError::io)
}

fn pipeline(a: PipelineArgs, seed: Option<u64>, jobs: Option<usize>) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(&a.config).map_err(|e| match e {
        crate::harness::ConfigError::Io { .. } => CliError::io(e),
        other => CliError::data(other),
    })?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let manifest = run_pipeline(&cfg, jobs).map_err(|e| match e.kind {
        FailureKind::Io => CliError::io(&e),
        FailureKind::Data => CliError::data(&e),
    })?;
    eprintln!(
        "wrote {} records from {} pages to {}",
        manifest.records.written,
        manifest.pages.kept,
        cfg.out_dir.display()
    );
    Ok(())
}
