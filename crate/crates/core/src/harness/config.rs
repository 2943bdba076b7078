use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::coref_by_name;
use crate::retrieval::RetrievalMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config is missing required key {0:?}")]
    Missing(&'static str),
}

/// Settings of one pipeline run.
///
/// The file format is one `key = value` per line; blank lines and lines
/// starting with `#` are ignored. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub dump_path: PathBuf,
    pub page_blocklist: Option<PathBuf>,
    pub entityset_blocklist: Option<PathBuf>,
    pub coref_plugin: String,
    pub retrieval: bool,
    pub retrieval_mode: RetrievalMode,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    pub fn new(dump_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            dump_path: dump_path.into(),
            page_blocklist: None,
            entityset_blocklist: None,
            coref_plugin: "pronoun".into(),
            retrieval: false,
            retrieval_mode: RetrievalMode::TopK,
            seed: 0,
            out_dir: out_dir.into(),
        }
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        PipelineConfig::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<PipelineConfig, ConfigError> {
        let mut dump_path = None;
        let mut out_dir = None;
        let mut cfg = PipelineConfig::new("", "");
        let resolve = |v: &str| {
            let p = Path::new(v);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Syntax { line, message };
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {trimmed:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let optional_path = |v: &str| if v.is_empty() { None } else { Some(resolve(v)) };
            match key {
                "dump_path" => dump_path = Some(resolve(value)),
                "out_dir" => out_dir = Some(resolve(value)),
                "page_blocklist" => cfg.page_blocklist = optional_path(value),
                "entityset_blocklist" => cfg.entityset_blocklist = optional_path(value),
                "coref_plugin" => {
                    let plugin = coref_by_name(value).ok_or_else(|| err(format!("unknown coref_plugin {value:?}")))?;
                    cfg.coref_plugin = plugin.name().to_string();
                }
                "retrieval" => {
                    cfg.retrieval = match value.to_ascii_lowercase().as_str() {
                        "on" | "true" | "yes" | "1" => true,
                        "off" | "false" | "no" | "0" => false,
                        _ => return Err(err(format!("retrieval must be on or off, got {value:?}"))),
                    }
                }
                "retrieval_mode" => {
                    cfg.retrieval_mode = match value.to_ascii_lowercase().as_str() {
                        "topk" | "top_k" => RetrievalMode::TopK,
                        "greedy" | "greedy_coverage" => RetrievalMode::GreedyCoverage,
                        _ => return Err(err(format!("unknown retrieval_mode {value:?}"))),
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("seed must be an unsigned integer, got {value:?}")))?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        cfg.dump_path = dump_path.ok_or(ConfigError::Missing("dump_path"))?;
        cfg.out_dir = out_dir.ok_or(ConfigError::Missing("out_dir"))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "# run\ndump_path = data/dump.xml\nout_dir=/tmp/out\npage_blocklist = pages.txt\nentityset_blocklist =\ncoref_plugin = none\nretrieval = on\nseed = 7\n";
        let cfg = PipelineConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.dump_path, PathBuf::from("/cfg/data/dump.xml"));
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/out"));
        assert_eq!(cfg.page_blocklist, Some(PathBuf::from("/cfg/pages.txt")));
        assert_eq!(cfg.entityset_blocklist, None);
        assert_eq!(cfg.coref_plugin, "none");
        assert!(cfg.retrieval);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn errors_name_the_line() {
        let err = PipelineConfig::parse("dump_path = a\nbogus = 1\n", Path::new("")).unwrap_err();
        assert!(err.to_string().starts_with("config line 2"));
        let err = PipelineConfig::parse("dump_path = a\n", Path::new("")).unwrap_err();
        assert!(matches!(err, ConfigError::Missing("out_dir")));
        assert!(PipelineConfig::parse("dump_path=a\nout_dir=b\nretrieval=maybe", Path::new("")).is_err());
    }
}
