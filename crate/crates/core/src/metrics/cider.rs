use std::collections::{BTreeMap, HashMap};

use super::{check_pairs, stable_mean, EvalPair, MetricError};

const MAX_N: usize = 4;

type Counts<'a> = BTreeMap<&'a [String], f64>;

fn ngrams(tokens: &[String], n: usize) -> Counts<'_> {
    let mut out = BTreeMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *out.entry(g).or_insert(0.0) += 1.0;
        }
    }
    out
}

/// Cosine similarity; zero when either vector is zero. Written as
/// `dot / sqrt(|a|² · |b|²)` so identical vectors give exactly 1.
fn cosine(a: &Counts<'_>, b: &Counts<'_>) -> f64 {
    let norm_a: f64 = a.values().map(|v| v * v).sum();
    let norm_b: f64 = b.values().map(|v| v * v).sum();
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().filter_map(|(g, x)| b.get(g).map(|y| x * y)).sum();
    dot / (norm_a * norm_b).sqrt()
}

/// CIDEr on a 0–10 scale.
///
/// Document frequencies come from the references of this corpus: `df(g)` is
/// the number of pairs with `g` in at least one reference, and
/// `idf(g) = ln(N / max(df(g), 1))`. Each sentence becomes a TF-IDF vector
/// per n-gram order; a pair scores the mean cosine against its references
/// averaged over n = 1..4, times 10. With a single pair every idf is zero
/// and so is the score.
pub fn cider(pairs: &[EvalPair]) -> Result<f64, MetricError> {
    check_pairs(pairs)?;
    let n_docs = pairs.len() as f64;
    let mut per_pair = vec![0.0f64; pairs.len()];
    for n in 1..=MAX_N {
        let mut df: HashMap<&[String], usize> = HashMap::new();
        let ref_counts: Vec<Vec<Counts<'_>>> = pairs
            .iter()
            .map(|p| p.references.iter().map(|r| ngrams(r, n)).collect())
            .collect();
        for refs in &ref_counts {
            let mut seen: Vec<&[String]> = refs.iter().flat_map(|c| c.keys().copied()).collect();
            seen.sort_unstable();
            seen.dedup();
            for g in seen {
                *df.entry(g).or_insert(0) += 1;
            }
        }
        let weigh = |counts: &mut Counts<'_>| {
            for (g, tf) in counts.iter_mut() {
                let d = df.get(g).copied().unwrap_or(0).max(1) as f64;
                *tf *= (n_docs / d).ln();
            }
        };
        for (i, (pair, refs)) in pairs.iter().zip(ref_counts).enumerate() {
            let mut hyp = ngrams(&pair.hypothesis, n);
            weigh(&mut hyp);
            let sims: Vec<f64> = refs
                .into_iter()
                .map(|mut r| {
                    weigh(&mut r);
                    cosine(&hyp, &r)
                })
                .collect();
            per_pair[i] += sims.iter().sum::<f64>() / sims.len() as f64;
        }
    }
    let scores = per_pair.into_iter().map(|s| (10.0 * s / MAX_N as f64).clamp(0.0, 10.0)).collect();
    Ok(stable_mean(scores))
}
