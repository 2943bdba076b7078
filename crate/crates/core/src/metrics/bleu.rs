use std::collections::HashMap;

use super::{check_pairs, EvalPair, MetricError};

const MAX_N: usize = 4;

/// Sufficient statistics for corpus BLEU; they add up across pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_N],
    pub totals: [u64; MAX_N],
    pub hyp_len: u64,
    pub ref_len: u64,
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u32> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

impl BleuStats {
    pub fn for_pair(pair: &EvalPair) -> BleuStats {
        let hyp = &pair.hypothesis;
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ..BleuStats::default()
        };
        // Closest reference length, the shorter one on ties.
        stats.ref_len = pair
            .references
            .iter()
            .map(|r| r.len() as u64)
            .min_by_key(|&r| (r.abs_diff(stats.hyp_len), r))
            .unwrap_or(0);
        for n in 1..=MAX_N {
            let hyp_counts = ngram_counts(hyp, n);
            let mut max_ref: HashMap<&[String], u32> = HashMap::new();
            for r in &pair.references {
                for (g, c) in ngram_counts(r, n) {
                    let slot = max_ref.entry(g).or_insert(0);
                    *slot = (*slot).max(c);
                }
            }
            let clipped: u32 = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
                .sum();
            stats.matches[n - 1] = u64::from(clipped);
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_N {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU-4 on a 0–100 scale, unsmoothed: any empty n-gram order gives 0.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 || self.matches.contains(&0) {
            return 0.0;
        }
        let log_p: f64 = (0..MAX_N)
            .map(|n| (self.matches[n] as f64 / self.totals[n] as f64).ln())
            .sum::<f64>()
            / MAX_N as f64;
        let bp = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        (100.0 * bp * log_p.exp()).clamp(0.0, 100.0)
    }
}

/// Corpus-level BLEU-4 with clipped counts and the closest-reference
/// brevity penalty.
pub fn bleu(pairs: &[EvalPair]) -> Result<f64, MetricError> {
    check_pairs(pairs)?;
    let mut total = BleuStats::default();
    for p in pairs {
        total.add(&BleuStats::for_pair(p));
    }
    Ok(total.score())
}
