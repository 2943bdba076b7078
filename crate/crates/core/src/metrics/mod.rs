//! Automatic text-generation metrics over one shared tokenizer.
//!
//! All metrics take [`EvalPair`]s: a tokenized hypothesis plus one or more
//! tokenized references. Corpus scores are either aggregated counts (BLEU)
//! or means of per-pair scores. Per-pair scores are summed in sorted order
//! so the mean does not depend on pair order, down to the last bit.

mod bleu;
mod cider;
mod meteor;
mod rouge;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu, BleuStats};
pub use cider::cider;
pub use meteor::{align_stats, meteor_lite, meteor_pair};
pub use rouge::{lcs_len, rouge_l, rouge_l_pair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("no hypotheses to score")]
    Empty,
    #[error("pair {0} has no references")]
    NoReferences(usize),
    #[error("empty concept list")]
    NoConcepts,
    #[error("expected concepts for {expected} pairs, got {got}")]
    ConceptCount { expected: usize, got: usize },
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
}

/// Lowercases, splits on whitespace, and makes every non-alphanumeric
/// character its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
            continue;
        }
        if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
        if !c.is_whitespace() {
            out.push(c.to_lowercase().collect());
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Porter stem of a lowercase token.
pub fn stem(token: &str) -> String {
    porter_stemmer::stem(token)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPair {
    pub hypothesis: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl EvalPair {
    pub fn new(hypothesis: Vec<String>, references: Vec<Vec<String>>) -> EvalPair {
        EvalPair { hypothesis, references }
    }

    /// Tokenizes raw strings with [`tokenize`].
    pub fn from_text<S: AsRef<str>>(hypothesis: &str, references: &[S]) -> EvalPair {
        EvalPair {
            hypothesis: tokenize(hypothesis),
            references: references.iter().map(|r| tokenize(r.as_ref())).collect(),
        }
    }
}

pub(crate) fn check_pairs(pairs: &[EvalPair]) -> Result<(), MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Empty);
    }
    match pairs.iter().position(|p| p.references.is_empty()) {
        Some(i) => Err(MetricError::NoReferences(i)),
        None => Ok(()),
    }
}

/// Mean that ignores input order: values are summed smallest first.
pub(crate) fn stable_mean(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Fraction of `concepts` whose stems all occur among the stems of
/// `hypothesis`. A concept may span several tokens ("ice cream").
pub fn concept_coverage<S: AsRef<str>>(concepts: &[S], hypothesis: &[String]) -> Result<f64, MetricError> {
    if concepts.is_empty() {
        return Err(MetricError::NoConcepts);
    }
    let stems: std::collections::HashSet<String> = hypothesis.iter().map(|t| stem(t)).collect();
    let hit = concepts
        .iter()
        .filter(|c| {
            let toks = tokenize(c.as_ref());
            !toks.is_empty() && toks.iter().all(|t| stems.contains(&stem(t)))
        })
        .count();
    Ok(hit as f64 / concepts.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Bleu,
    RougeL,
    MeteorLite,
    Cider,
    Coverage,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Bleu, Metric::RougeL, Metric::MeteorLite, Metric::Cider, Metric::Coverage];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::RougeL => "rouge_l",
            Metric::MeteorLite => "meteor_lite",
            Metric::Cider => "cider",
            Metric::Coverage => "coverage",
        }
    }

    /// Parses a comma-separated list such as `"bleu,rouge_l"`.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>, MetricError> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let m = Metric::ALL
                .into_iter()
                .find(|m| m.name() == name)
                .ok_or_else(|| MetricError::UnknownMetric(name.to_string()))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Scores of one evaluation run. Metrics that were not requested are
/// omitted from the JSON form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bleu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rouge_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meteor_lite: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cider: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    pub n_pairs: usize,
}

/// Runs the requested metrics. `concepts` is required for coverage only and
/// must hold one concept list per pair.
pub fn evaluate(pairs: &[EvalPair], concepts: Option<&[Vec<String>]>, metrics: &[Metric]) -> Result<ScoreReport, MetricError> {
    check_pairs(pairs)?;
    let mut report = ScoreReport {
        n_pairs: pairs.len(),
        ..ScoreReport::default()
    };
    for &m in metrics {
        match m {
            Metric::Bleu => report.bleu = Some(bleu(pairs)?),
            Metric::RougeL => report.rouge_l = Some(rouge_l(pairs)?),
            Metric::MeteorLite => report.meteor_lite = Some(meteor_lite(pairs)?),
            Metric::Cider => report.cider = Some(cider(pairs)?),
            Metric::Coverage => {
                let concepts = concepts.ok_or(MetricError::ConceptCount {
                    expected: pairs.len(),
                    got: 0,
                })?;
                if concepts.len() != pairs.len() {
                    return Err(MetricError::ConceptCount {
                        expected: pairs.len(),
                        got: concepts.len(),
                    });
                }
                let scores = pairs
                    .iter()
                    .zip(concepts)
                    .map(|(p, c)| concept_coverage(c, &p.hypothesis))
                    .collect::<Result<Vec<_>, _>>()?;
                report.coverage = Some(stable_mean(scores));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer() {
        assert_eq!(tokenize("Hello, World! It's 3.5"), ["hello", ",", "world", "!", "it", "'", "s", "3", ".", "5"]);
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn coverage_examples() {
        let hyp = tokenize("A boy is playing frisbee with his friends");
        assert_eq!(concept_coverage(&["dog", "frisbee", "catch", "throw"], &hyp).unwrap(), 0.25);
        assert_eq!(concept_coverage(&["dog"], &tokenize("dogs run")).unwrap(), 1.0);
        assert_eq!(concept_coverage(&["boy", "friend"], &hyp).unwrap(), 1.0);
        assert_eq!(concept_coverage::<&str>(&[], &hyp), Err(MetricError::NoConcepts));
    }

    #[test]
    fn metric_list() {
        assert_eq!(Metric::parse_list("bleu, cider").unwrap(), [Metric::Bleu, Metric::Cider]);
        assert!(Metric::parse_list("bleu,spice").is_err());
    }

    #[test]
    fn report_omits_unrequested() {
        let pairs = [EvalPair::from_text("a b c d", &["a b c d"])];
        let r = evaluate(&pairs, None, &[Metric::RougeL]).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"rouge_l":1.0,"n_pairs":1}"#);
        assert!(evaluate(&pairs, None, &[Metric::Coverage]).is_err());
    }
}
