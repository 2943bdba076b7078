//! Brute-force reference implementations and random input generators shared
//! by the integration tests. Each oracle recomputes its metric the slow,
//! obvious way so it can be checked against the optimized code.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use ver_forge::corpus::{Example, ExampleKind};
use ver_forge::metrics::{stem, EvalPair};
use ver_forge::retrieval::{ExampleId, Hit};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

fn ngrams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].to_vec()).collect()
}

fn occurrences(grams: &[Vec<String>], g: &[String]) -> usize {
    grams.iter().filter(|x| x.as_slice() == g).count()
}

/// Corpus BLEU-4 (0–100) by direct counting: clipped n-gram matches summed
/// over the corpus, closest reference length with ties going to the shorter
/// one, no smoothing.
pub fn oracle_bleu(pairs: &[EvalPair]) -> f64 {
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for p in pairs {
        let h = p.hypothesis.len();
        c += h;
        let mut best = usize::MAX;
        let mut best_diff = usize::MAX;
        for reference in &p.references {
            let d = reference.len().abs_diff(h);
            if d < best_diff || (d == best_diff && reference.len() < best) {
                best_diff = d;
                best = reference.len();
            }
        }
        r += best;
        for n in 1..=4 {
            let hyp = ngrams(&p.hypothesis, n);
            let refs: Vec<Vec<Vec<String>>> = p.references.iter().map(|x| ngrams(x, n)).collect();
            totals[n - 1] += hyp.len();
            let distinct: BTreeSet<&Vec<String>> = hyp.iter().collect();
            for g in distinct {
                let in_hyp = occurrences(&hyp, g);
                let in_ref = refs.iter().map(|rg| occurrences(rg, g)).max().unwrap_or(0);
                matches[n - 1] += in_hyp.min(in_ref);
            }
        }
    }
    if c == 0 || matches.contains(&0) {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..4 {
        log_sum += (matches[n] as f64 / totals[n] as f64).ln();
    }
    let bp = if c >= r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * (log_sum / 4.0).exp()
}

/// Longest common subsequence by top-down memoized recursion.
pub fn oracle_lcs(a: &[String], b: &[String]) -> usize {
    fn go(a: &[String], b: &[String], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// Mean over pairs of the best ROUGE-L F1 against any reference.
pub fn oracle_rouge_l(pairs: &[EvalPair]) -> f64 {
    let per_pair: Vec<f64> = pairs
        .iter()
        .map(|p| {
            p.references
                .iter()
                .map(|r| {
                    let l = oracle_lcs(&p.hypothesis, r) as f64;
                    if l == 0.0 {
                        return 0.0;
                    }
                    let prec = l / p.hypothesis.len() as f64;
                    let rec = l / r.len() as f64;
                    2.0 * prec * rec / (prec + rec)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    per_pair.iter().sum::<f64>() / per_pair.len() as f64
}

/// Enumerates one-to-one stem alignments and returns the largest match count
/// together with the fewest chunks among alignments reaching it.
///
/// The search tries every reference position for every hypothesis token. Two
/// cuts keep it tractable on repetitive sentences, and neither can discard an
/// optimum: a branch stops once it can no longer reach the maximum match
/// count (the sum over stems of the smaller occurrence count), or once it
/// already has as many chunks as the best alignment found.
pub fn oracle_alignment(hyp: &[String], reference: &[String]) -> (usize, usize) {
    let hs: Vec<String> = hyp.iter().map(|t| stem(t)).collect();
    let rs: Vec<String> = reference.iter().map(|t| stem(t)).collect();
    let mut max_matches = 0;
    let distinct: BTreeSet<&String> = hs.iter().collect();
    for s in distinct {
        let in_h = hs.iter().filter(|x| *x == s).count();
        let in_r = rs.iter().filter(|x| *x == s).count();
        max_matches += in_h.min(in_r);
    }
    if max_matches == 0 {
        return (0, 0);
    }

    struct Search<'a> {
        hs: &'a [String],
        rs: &'a [String],
        target: usize,
        used: Vec<bool>,
        best_chunks: usize,
    }

    impl Search<'_> {
        /// `prev` is the reference position of token `i - 1` when it was aligned.
        fn walk(&mut self, i: usize, prev: Option<usize>, matches: usize, chunks: usize) {
            if chunks >= self.best_chunks || matches + (self.hs.len() - i) < self.target {
                return;
            }
            if i == self.hs.len() {
                self.best_chunks = chunks;
                return;
            }
            for j in 0..self.rs.len() {
                if !self.used[j] && self.rs[j] == self.hs[i] {
                    let extends = prev.is_some_and(|p| p + 1 == j);
                    self.used[j] = true;
                    self.walk(i + 1, Some(j), matches + 1, chunks + usize::from(!extends));
                    self.used[j] = false;
                }
            }
            self.walk(i + 1, None, matches, chunks);
        }
    }

    let mut search = Search {
        hs: &hs,
        rs: &rs,
        target: max_matches,
        used: vec![false; rs.len()],
        best_chunks: usize::MAX,
    };
    search.walk(0, None, 0, 0);
    (max_matches, search.best_chunks)
}

pub fn meteor_formula(matches: usize, chunks: usize, hyp_len: usize, ref_len: usize) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let p = m / hyp_len as f64;
    let r = m / ref_len as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    fmean * (1.0 - 0.5 * (chunks as f64 / m).powi(3))
}

pub fn oracle_meteor(pairs: &[EvalPair]) -> f64 {
    let per_pair: Vec<f64> = pairs
        .iter()
        .map(|p| {
            p.references
                .iter()
                .map(|r| {
                    let (m, ch) = oracle_alignment(&p.hypothesis, r);
                    meteor_formula(m, ch, p.hypothesis.len(), r.len())
                })
                .fold(0.0, f64::max)
        })
        .collect();
    per_pair.iter().sum::<f64>() / per_pair.len() as f64
}

/// CIDEr (0–10) with dense TF-IDF vectors over the full n-gram vocabulary.
/// Document frequency counts pairs with the n-gram in any reference.
pub fn oracle_cider(pairs: &[EvalPair]) -> f64 {
    let n_docs = pairs.len() as f64;
    let mut total = vec![0.0f64; pairs.len()];
    for n in 1..=4 {
        let mut vocab: Vec<Vec<String>> = Vec::new();
        for p in pairs {
            vocab.extend(ngrams(&p.hypothesis, n));
            for r in &p.references {
                vocab.extend(ngrams(r, n));
            }
        }
        vocab.sort();
        vocab.dedup();
        let idf: Vec<f64> = vocab
            .iter()
            .map(|g| {
                let df = pairs
                    .iter()
                    .filter(|p| p.references.iter().any(|r| occurrences(&ngrams(r, n), g) > 0))
                    .count();
                (n_docs / df.max(1) as f64).ln()
            })
            .collect();
        let vector = |tokens: &[String]| -> Vec<f64> {
            let grams = ngrams(tokens, n);
            vocab.iter().zip(&idf).map(|(g, w)| occurrences(&grams, g) as f64 * w).collect()
        };
        for (i, p) in pairs.iter().enumerate() {
            let h = vector(&p.hypothesis);
            let mut sum = 0.0;
            for r in &p.references {
                let v = vector(r);
                let dot: f64 = h.iter().zip(&v).map(|(a, b)| a * b).sum();
                let na: f64 = h.iter().map(|a| a * a).sum();
                let nb: f64 = v.iter().map(|b| b * b).sum();
                if na > 0.0 && nb > 0.0 {
                    sum += dot / (na * nb).sqrt();
                }
            }
            total[i] += sum / p.references.len() as f64;
        }
    }
    total.iter().map(|s| 10.0 * s / 4.0).sum::<f64>() / pairs.len() as f64
}

/// Small vocabulary with several words sharing a stem, so stem matches,
/// repeats and partial n-gram overlaps all come up often.
pub const VOCAB: &[&str] = &[
    "the", "a", "dog", "dogs", "cat", "runs", "running", "run", "ball", "park", "in", "jumps", "jumped", ".",
];

pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect()
}

/// Up to `max_pairs` pairs of 1..=`max_len` tokens with 1..=3 references.
pub fn random_corpus<R: Rng>(rng: &mut R, max_pairs: usize, max_len: usize) -> Vec<EvalPair> {
    let n = rng.gen_range(1..=max_pairs);
    (0..n)
        .map(|_| {
            let hyp = random_sentence(rng, max_len);
            let n_refs = rng.gen_range(1..=3);
            let refs = (0..n_refs)
                .map(|_| {
                    // Half of the references are edits of the hypothesis so that
                    // higher-order n-grams match too.
                    if rng.gen_bool(0.5) {
                        let mut r = hyp.clone();
                        let edits = rng.gen_range(0..=2);
                        for _ in 0..edits {
                            let i = rng.gen_range(0..r.len());
                            r[i] = VOCAB.choose(rng).unwrap().to_string();
                        }
                        if rng.gen_bool(0.3) {
                            r.push(VOCAB.choose(rng).unwrap().to_string());
                        }
                        r.truncate(max_len);
                        r
                    } else {
                        random_sentence(rng, max_len)
                    }
                })
                .collect();
            EvalPair::new(hyp, refs)
        })
        .collect()
}

/// Pairs whose hypothesis equals its single reference. Each pair carries a
/// token no other pair has, so every n-gram containing it has idf > 0, and
/// each sentence has at least four tokens so all n-gram orders exist.
pub fn identical_corpus<R: Rng>(rng: &mut R, n_pairs: usize, max_len: usize) -> Vec<EvalPair> {
    (0..n_pairs)
        .map(|i| {
            let len = rng.gen_range(4..=max_len.max(4));
            let mut s: Vec<String> = (0..len).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect();
            let slot = rng.gen_range(0..len);
            s[slot] = format!("unique{i}");
            EvalPair::new(s.clone(), vec![s])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Retrieval
// ---------------------------------------------------------------------------

fn key_set<S: AsRef<str>>(entities: &[S]) -> HashSet<String> {
    entities
        .iter()
        .map(|e| e.as_ref().trim().to_lowercase())
        .filter(|e| !e.is_empty())
        .collect()
}

/// Exclusion filter shared by both retrieval oracles.
fn admissible(examples: &[Example], id: usize, exclude: Option<ExampleId>) -> bool {
    match exclude {
        Some(x) => {
            let x = x as usize;
            id != x && (x >= examples.len() || examples[id].sentence != examples[x].sentence)
        }
        None => true,
    }
}

/// Scores every example against the query and sorts by overlap descending,
/// then id ascending. Ids are positions in `examples`.
pub fn oracle_top_k<S: AsRef<str>>(examples: &[Example], entities: &[S], k: usize, exclude: Option<ExampleId>) -> Vec<Hit> {
    let query = key_set(entities);
    let mut hits: Vec<Hit> = examples
        .iter()
        .enumerate()
        .filter(|(id, _)| admissible(examples, *id, exclude))
        .map(|(id, ex)| Hit {
            id: id as ExampleId,
            overlap: key_set(&ex.entity_ids).intersection(&query).count() as u32,
        })
        .filter(|h| h.overlap > 0)
        .collect();
    hits.sort_by(|a, b| b.overlap.cmp(&a.overlap).then(a.id.cmp(&b.id)));
    hits.truncate(k);
    hits
}

/// Greedy coverage selection recomputed from scratch at every step.
pub fn oracle_greedy<S: AsRef<str>>(examples: &[Example], entities: &[S], k: usize, exclude: Option<ExampleId>) -> Vec<Hit> {
    let query = key_set(entities);
    let mut pool: Vec<(usize, HashSet<String>)> = examples
        .iter()
        .enumerate()
        .filter(|(id, _)| admissible(examples, *id, exclude))
        .map(|(id, ex)| (id, key_set(&ex.entity_ids).intersection(&query).cloned().collect::<HashSet<_>>()))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    let all: HashSet<String> = pool.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
    let mut uncovered = all.clone();
    let mut out = Vec::new();
    while out.len() < k && !pool.is_empty() {
        if uncovered.is_empty() {
            uncovered = all.clone();
        }
        let mut best = 0;
        for i in 1..pool.len() {
            let score = |j: usize| (pool[j].1.intersection(&uncovered).count(), pool[j].1.len());
            if score(i) > score(best) {
                best = i;
            }
        }
        let (id, set) = pool.remove(best);
        for s in &set {
            uncovered.remove(s);
        }
        out.push(Hit {
            id: id as ExampleId,
            overlap: set.len() as u32,
        });
    }
    out
}

pub fn entity_name(i: usize) -> String {
    format!("entity {i}")
}

/// `n` examples with 1..=`max_entities` distinct entities drawn from a pool of
/// `pool` names. Some sentences repeat so duplicate-text exclusion is
/// exercised.
pub fn random_examples<R: Rng>(rng: &mut R, n: usize, max_entities: usize, pool: usize) -> Vec<Example> {
    (0..n)
        .map(|i| {
            let size = rng.gen_range(1..=max_entities.min(pool));
            let picked = rand::seq::index::sample(rng, pool, size);
            let entities: Vec<String> = picked.iter().map(|e| {
                // Vary case and padding; keys ignore both.
                let name = entity_name(e);
                if rng.gen_bool(0.2) {
                    format!(" {} ", name.to_uppercase())
                } else {
                    name
                }
            }).collect();
            let sentence = if rng.gen_bool(0.05) && i > 0 {
                format!("sentence {}", rng.gen_range(0..i))
            } else {
                format!("sentence {i}")
            };
            Example {
                entity_ids: entities.clone(),
                kind: ExampleKind::for_size(entities.len()),
                entities,
                sentence,
                source_page: format!("Page {}", i / 7),
                sentence_index: (i % 7) as u32,
            }
        })
        .collect()
}

pub fn random_query<R: Rng>(rng: &mut R, max_entities: usize, pool: usize) -> Vec<String> {
    let size = rng.gen_range(1..=max_entities.min(pool));
    rand::seq::index::sample(rng, pool + 3, size)
        .iter()
        .map(entity_name)
        .collect()
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// Checks that the entities occur in the sentence in the listed order, each
/// one found after the previous one's match (case-insensitive).
pub fn in_first_occurrence_order(example: &Example) -> bool {
    let sentence = example.sentence.to_lowercase();
    let mut from = 0;
    for e in &example.entities {
        let e = e.to_lowercase();
        match sentence[from..].find(&e) {
            Some(pos) => from += pos + e.len(),
            None => return false,
        }
    }
    true
}
