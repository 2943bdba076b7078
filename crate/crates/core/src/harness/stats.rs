use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Example, ExampleKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub definition: u64,
    pub relation: u64,
    pub hyper: u64,
}

/// Entity-set size distribution of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Entity-set size → number of examples.
    pub histogram: BTreeMap<usize, u64>,
    pub total: u64,
    pub by_kind: KindCounts,
}

pub fn corpus_stats(examples: &[Example]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for ex in examples {
        stats.add(ex.entities.len());
    }
    stats
}

impl CorpusStats {
    pub fn add(&mut self, set_size: usize) {
        *self.histogram.entry(set_size).or_insert(0) += 1;
        self.total += 1;
        match ExampleKind::for_size(set_size) {
            ExampleKind::Definition => self.by_kind.definition += 1,
            ExampleKind::Relation => self.by_kind.relation += 1,
            ExampleKind::Hyper => self.by_kind.hyper += 1,
        }
    }

    /// Horizontal bar chart, one line per entity-set size, bars scaled to
    /// `width` characters.
    pub fn render_histogram(&self, width: usize) -> String {
        let mut out = String::new();
        let peak = self.histogram.values().copied().max().unwrap_or(0);
        let label_width = self.histogram.keys().map(|k| k.to_string().len()).max().unwrap_or(1);
        for (&size, &count) in &self.histogram {
            let bar = if peak == 0 {
                0
            } else {
                ((count as f64 / peak as f64) * width as f64).round() as usize
            };
            let pct = 100.0 * count as f64 / self.total.max(1) as f64;
            let _ = writeln!(
                out,
                "|E|={size:>label_width$} {:<width$} {count} ({pct:.1}%)",
                "#".repeat(bar.max(usize::from(count > 0)))
            );
        }
        let _ = writeln!(
            out,
            "total {}  definition {}  relation {}  hyper {}",
            self.total, self.by_kind.definition, self.by_kind.relation, self.by_kind.hyper
        );
        out
    }
}
