use std::collections::HashMap;

use super::{check_pairs, stable_mean, EvalPair, MetricError};

/// Length of the longest common subsequence of `a` and `b`.
///
/// Bit-parallel over `a` (Hyyrö's formulation), so the cost is
/// `O(|b| · ⌈|a| / 64⌉)` word operations.
pub fn lcs_len<T: Eq + std::hash::Hash>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let words = a.len().div_ceil(64);
    let mut masks: HashMap<&T, Vec<u64>> = HashMap::new();
    for (i, t) in a.iter().enumerate() {
        masks.entry(t).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }
    let mut v = vec![!0u64; words];
    for t in b {
        let Some(m) = masks.get(t) else { continue };
        let mut carry = false;
        for w in 0..words {
            let x = v[w];
            let u = x & m[w];
            let (s1, c1) = x.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(u64::from(carry));
            carry = c1 || c2;
            v[w] = s2 | (x & !m[w]);
        }
    }
    let tail = a.len() % 64;
    let ones: usize = v
        .iter()
        .enumerate()
        .map(|(w, &x)| {
            let x = if w == words - 1 && tail != 0 { x & ((1u64 << tail) - 1) } else { x };
            x.count_ones() as usize
        })
        .sum();
    a.len() - ones
}

fn f_measure(lcs: usize, hyp: usize, reference: usize) -> f64 {
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / hyp as f64;
    let r = lcs as f64 / reference as f64;
    2.0 * p * r / (p + r)
}

/// Best ROUGE-L F1 of the hypothesis against any of its references.
pub fn rouge_l_pair(pair: &EvalPair) -> f64 {
    pair.references
        .iter()
        .map(|r| f_measure(lcs_len(r, &pair.hypothesis), pair.hypothesis.len(), r.len()))
        .fold(0.0, f64::max)
}

/// Mean per-pair ROUGE-L F1 (β = 1).
pub fn rouge_l(pairs: &[EvalPair]) -> Result<f64, MetricError> {
    check_pairs(pairs)?;
    Ok(stable_mean(pairs.iter().map(rouge_l_pair).collect()))
}
