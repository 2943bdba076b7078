//! Experiment plumbing: corpus statistics, low-resource sampling, and the
//! end-to-end pipeline run driven by a config file.

mod config;
mod pipeline;
mod sample;
mod stats;

pub use config::{ConfigError, PipelineConfig};
pub use pipeline::{
    augment_corpus, build_corpus, encode_corpus, run_pipeline, CorpusBuild, ExampleCounts, FailureKind, Manifest,
    ManifestConfig, PageCounts, PipelineError, RecordCounts, Stage, WarningCounts, AUGMENT_SHARD, CORPUS_FILE,
    INDEX_FILE, MANIFEST_FILE, RECORDS_FILE, STATS_FILE,
};
pub use sample::{sample_indices, sample_low_resource, SampleError, SampleSpec};
pub use stats::{corpus_stats, CorpusStats, KindCounts};
