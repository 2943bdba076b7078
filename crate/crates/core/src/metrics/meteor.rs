//! METEOR restricted to exact and Porter-stem matches.
//!
//! Two tokens match when their stems are equal, which covers exact matches.
//! Among alignments with the most matches, the one with the fewest chunks
//! wins; a chunk is a run of hypothesis tokens aligned to consecutive
//! reference positions.

use std::collections::HashMap;

use super::{check_pairs, stable_mean, stem, EvalPair, MetricError};

/// Above this many memoized states the search switches to a greedy
/// alignment. Sentences of up to 12 tokens never reach it.
const STATE_BUDGET: usize = 1 << 20;
/// Matchable reference positions must fit the `u128` mask.
const MAX_MASK_BITS: usize = 128;
/// Bounds the recursion depth of the exact search.
const MAX_EXACT_HYP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignStats {
    pub matches: usize,
    pub chunks: usize,
}

struct Problem {
    /// Class of each hypothesis token; `usize::MAX` for tokens that never match.
    hyp_class: Vec<usize>,
    /// Hypothesis tokens of the same class at or after each position.
    hyp_rest: Vec<usize>,
    /// Matches each class contributes to a maximal alignment.
    need: Vec<usize>,
    /// Bits of the matchable reference positions of each class.
    class_bits: Vec<u128>,
    /// Reference position of each bit.
    bit_pos: Vec<usize>,
}

impl Problem {
    fn new(hyp: &[usize], reference: &[usize]) -> Option<(Problem, usize)> {
        let classes = hyp.iter().chain(reference).copied().max().map_or(0, |m| m + 1);
        let mut hyp_count = vec![0usize; classes];
        let mut ref_count = vec![0usize; classes];
        hyp.iter().for_each(|&c| hyp_count[c] += 1);
        reference.iter().for_each(|&c| ref_count[c] += 1);
        let need: Vec<usize> = (0..classes).map(|c| hyp_count[c].min(ref_count[c])).collect();
        let matches = need.iter().sum();

        let mut class_bits = vec![0u128; classes];
        let mut bit_pos = Vec::new();
        for (j, &c) in reference.iter().enumerate() {
            if need[c] > 0 {
                if bit_pos.len() == MAX_MASK_BITS {
                    return None;
                }
                class_bits[c] |= 1 << bit_pos.len();
                bit_pos.push(j);
            }
        }
        let mut seen = vec![0usize; classes];
        let mut hyp_rest = vec![0; hyp.len()];
        for (i, &c) in hyp.iter().enumerate().rev() {
            seen[c] += 1;
            hyp_rest[i] = seen[c];
        }
        let hyp_class = hyp.iter().map(|&c| if need[c] > 0 { c } else { usize::MAX }).collect();
        Some((
            Problem {
                hyp_class,
                hyp_rest,
                need,
                class_bits,
                bit_pos,
            },
            matches,
        ))
    }

    fn still_needed(&self, c: usize, mask: u128) -> usize {
        self.need[c] - (mask & self.class_bits[c]).count_ones() as usize
    }

    /// Fewest chunks for hypothesis positions `i..`, given the used
    /// reference bits and the reference position of token `i - 1`.
    fn solve(&self, i: usize, mask: u128, prev: Option<usize>, memo: &mut HashMap<(usize, u128, Option<usize>), usize>) -> Option<usize> {
        if i == self.hyp_class.len() {
            return Some(0);
        }
        let c = self.hyp_class[i];
        if c == usize::MAX {
            return self.solve(i + 1, mask, None, memo);
        }
        let key = (i, mask, prev);
        if let Some(&v) = memo.get(&key) {
            return Some(v);
        }
        if memo.len() >= STATE_BUDGET {
            return None;
        }
        let needed = self.still_needed(c, mask);
        let mut best = usize::MAX;
        // Skipping is allowed only if later tokens of the class can still
        // supply the needed matches.
        if self.hyp_rest[i] > needed {
            best = self.solve(i + 1, mask, None, memo)?;
        }
        if needed > 0 {
            let mut free = self.class_bits[c] & !mask;
            while free != 0 {
                let bit = free.trailing_zeros() as usize;
                free &= free - 1;
                let j = self.bit_pos[bit];
                let opens = usize::from(prev.map_or(true, |p| p + 1 != j));
                let rest = self.solve(i + 1, mask | (1 << bit), Some(j), memo)?;
                best = best.min(opens + rest);
            }
        }
        memo.insert(key, best);
        Some(best)
    }
}

/// Maximal-match alignment built left to right, continuing the current chunk
/// whenever possible. Used when the exact search is too large.
fn greedy_chunks(hyp: &[usize], reference: &[usize]) -> AlignStats {
    let classes = hyp.iter().chain(reference).copied().max().map_or(0, |m| m + 1);
    let mut free: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (j, &c) in reference.iter().enumerate() {
        free[c].push(j);
    }
    let mut matches = 0;
    let mut chunks = 0;
    let mut prev: Option<usize> = None;
    for &c in hyp {
        let slots = &mut free[c];
        if slots.is_empty() {
            prev = None;
            continue;
        }
        let pick = prev
            .and_then(|p| slots.iter().position(|&j| j == p + 1))
            .unwrap_or(0);
        let j = slots.remove(pick);
        if prev.map_or(true, |p| p + 1 != j) {
            chunks += 1;
        }
        matches += 1;
        prev = Some(j);
    }
    AlignStats { matches, chunks }
}

fn intern(tokens: &[String], table: &mut HashMap<String, usize>) -> Vec<usize> {
    tokens
        .iter()
        .map(|t| {
            let next = table.len();
            *table.entry(stem(t)).or_insert(next)
        })
        .collect()
}

/// Matches and chunks of the best stem alignment between two token lists.
pub fn align_stats(hypothesis: &[String], reference: &[String]) -> AlignStats {
    let mut table = HashMap::new();
    let hyp = intern(hypothesis, &mut table);
    let reference = intern(reference, &mut table);
    if hyp.len() > MAX_EXACT_HYP {
        return greedy_chunks(&hyp, &reference);
    }
    let Some((problem, matches)) = Problem::new(&hyp, &reference) else {
        return greedy_chunks(&hyp, &reference);
    };
    if matches == 0 {
        return AlignStats { matches: 0, chunks: 0 };
    }
    let mut memo = HashMap::new();
    match problem.solve(0, 0, None, &mut memo) {
        Some(chunks) => AlignStats { matches, chunks },
        None => greedy_chunks(&hyp, &reference),
    }
}

fn score(stats: AlignStats, hyp_len: usize, ref_len: usize) -> f64 {
    if stats.matches == 0 {
        return 0.0;
    }
    let m = stats.matches as f64;
    let p = m / hyp_len as f64;
    let r = m / ref_len as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (stats.chunks as f64 / m).powi(3);
    fmean * (1.0 - penalty)
}

/// Best score of the hypothesis against any of its references.
pub fn meteor_pair(pair: &EvalPair) -> f64 {
    pair.references
        .iter()
        .map(|r| score(align_stats(&pair.hypothesis, r), pair.hypothesis.len(), r.len()))
        .fold(0.0, f64::max)
}

pub fn meteor_lite(pairs: &[EvalPair]) -> Result<f64, MetricError> {
    check_pairs(pairs)?;
    Ok(stable_mean(pairs.iter().map(meteor_pair).collect()))
}
