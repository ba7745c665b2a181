//! Deterministic benchmark dataset generation: n integers equally spaced
//! across the full signed 64-bit range, independently shuffled per
//! dimension with MT19937-64.

use crate::error::{KdError, Result};
use crate::mt::{Mt19937_64, DEFAULT_SEED};
use crate::tuple::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(KdError::InvalidInput("n must be >= 1".into()));
        }
        if k < 2 {
            return Err(KdError::InvalidInput(format!("k must be >= 2, got {k}")));
        }
        Ok(GenSpec { n, k, seed })
    }

    pub fn with_default_seed(n: usize, k: usize) -> Result<Self> {
        GenSpec::new(n, k, DEFAULT_SEED)
    }
}

/// The n equally spaced coordinate values: base is the minimum signed
/// 64-bit value and the spacing is the full 2^64 range divided by n,
/// truncating.
fn spaced_values(n: usize) -> Vec<i64> {
    let spacing = (1u128 << 64) / n as u128;
    (0..n)
        .map(|i| (i64::MIN as i128 + (i as u128 * spacing) as i128) as i64)
        .collect()
}

/// Generates the dataset for `spec`. One generator seeds all dimensions:
/// the value array is shuffled and copied into dimension 0, reshuffled and
/// copied into dimension 1, and so on, so the same spec yields a
/// bit-identical dataset on every platform.
pub fn generate_tuples(spec: GenSpec) -> Dataset {
    let GenSpec { n, k, seed } = spec;
    let mut values = spaced_values(n);
    let mut rng = Mt19937_64::new(seed);
    let mut coords = vec![0i64; n * k];
    for dim in 0..k {
        rng.shuffle(&mut values);
        for i in 0..n {
            coords[i * k + dim] = values[i];
        }
    }
    Dataset::from_flat(coords, k).expect("generated coordinates are well-formed")
}
