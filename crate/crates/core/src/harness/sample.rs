use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Example;

/// How many examples a low-resource run keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSpec {
    /// A share of the corpus in `(0, 1]`.
    Fraction(f64),
    /// An absolute number of examples.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("fraction {0} is outside (0, 1]")]
    BadFraction(f64),
    #[error("sample size must be positive")]
    ZeroCount,
    #[error("cannot sample {wanted} examples from a corpus of {available}")]
    TooLarge { wanted: usize, available: usize },
    #[error("invalid sample size {0:?}")]
    Parse(String),
}

impl SampleSpec {
    /// The low-resource regimes used in the experiments.
    pub const PRESETS: [(&'static str, SampleSpec); 4] = [
        ("10%", SampleSpec::Fraction(0.1)),
        ("50", SampleSpec::Count(50)),
        ("500", SampleSpec::Count(500)),
        ("5000", SampleSpec::Count(5000)),
    ];

    /// Number of examples to draw from a corpus of `len`. A fraction always
    /// keeps at least one example of a non-empty corpus.
    pub fn size_for(&self, len: usize) -> Result<usize, SampleError> {
        match *self {
            SampleSpec::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(SampleError::BadFraction(f));
                }
                if len == 0 {
                    return Ok(0);
                }
                Ok(((f * len as f64).round() as usize).clamp(1, len))
            }
            SampleSpec::Count(0) => Err(SampleError::ZeroCount),
            SampleSpec::Count(n) if n > len => Err(SampleError::TooLarge { wanted: n, available: len }),
            SampleSpec::Count(n) => Ok(n),
        }
    }
}

impl FromStr for SampleSpec {
    type Err = SampleError;

    /// Accepts `"10%"`, `"0.1"` (fractions) and `"500"` (counts).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SampleError::Parse(s.to_string());
        if let Some(pct) = s.strip_suffix('%') {
            let v: f64 = pct.trim().parse().map_err(|_| bad())?;
            return Ok(SampleSpec::Fraction(v / 100.0));
        }
        if let Ok(n) = s.parse::<usize>() {
            return Ok(SampleSpec::Count(n));
        }
        s.parse::<f64>().map(SampleSpec::Fraction).map_err(|_| bad())
    }
}

impl fmt::Display for SampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSpec::Fraction(v) => write!(f, "{}%", v * 100.0),
            SampleSpec::Count(n) => write!(f, "{n}"),
        }
    }
}

/// Indices of a uniform sample without replacement, ascending.
pub fn sample_indices(len: usize, spec: SampleSpec, seed: u64) -> Result<Vec<usize>, SampleError> {
    let n = spec.size_for(len)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, len, n).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Uniform sample of `examples` without replacement, in corpus order.
pub fn sample_low_resource(examples: &[Example], spec: SampleSpec, seed: u64) -> Result<Vec<Example>, SampleError> {
    Ok(sample_indices(examples.len(), spec, seed)?
        .into_iter()
        .map(|i| examples[i].clone())
        .collect())
}
