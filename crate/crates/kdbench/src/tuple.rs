//! Tuples, super-key comparison, and median split arithmetic.
//!
//! A tuple is a k-dimensional point of signed 64-bit coordinates. Tuples are
//! never compared coordinate-by-coordinate in isolation; instead each tree
//! level compares *super keys*: the cyclic permutation of the coordinates
//! starting at that level's lead dimension, ordered lexicographically. For
//! k = 3 the super keys are x:y:z, y:z:x, and z:x:y. Distinct tuples always
//! compare unequal under every super key, which is what makes the balanced
//! tree unique.

use std::cmp::Ordering;

use crate::error::{KdError, Result};

/// A dataset of n tuples stored as one flat coordinate array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    coords: Vec<i64>,
    k: usize,
}

impl Dataset {
    /// Builds a dataset from a flat row-major coordinate array.
    pub fn from_flat(coords: Vec<i64>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(KdError::InvalidInput(format!("k must be >= 2, got {k}")));
        }
        if coords.len() % k != 0 {
            return Err(KdError::InvalidInput(format!(
                "coordinate count {} is not a multiple of k = {k}",
                coords.len()
            )));
        }
        Ok(Dataset { coords, k })
    }

    pub fn from_tuples(tuples: &[Vec<i64>], k: usize) -> Result<Self> {
        let mut coords = Vec::with_capacity(tuples.len() * k);
        for t in tuples {
            if t.len() != k {
                return Err(KdError::InvalidInput(format!(
                    "tuple has {} coordinates, expected {k}",
                    t.len()
                )));
            }
            coords.extend_from_slice(t);
        }
        Dataset::from_flat(coords, k)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.k
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// The tuple at dataset address `i`.
    #[inline]
    pub fn tuple(&self, i: usize) -> &[i64] {
        &self.coords[i * self.k..(i + 1) * self.k]
    }
}

/// Identifies one of the k super keys: comparison starts at `lead` and
/// cycles through all k dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuperKeySpec {
    lead: usize,
    k: usize,
}

impl SuperKeySpec {
    pub fn new(lead: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(KdError::InvalidInput(format!("k must be >= 2, got {k}")));
        }
        if lead >= k {
            return Err(KdError::InvalidInput(format!(
                "lead dimension {lead} out of range for k = {k}"
            )));
        }
        Ok(SuperKeySpec { lead, k })
    }

    /// The super key governing tree depth `d`, i.e. lead = d mod k.
    pub fn for_depth(depth: usize, k: usize) -> Self {
        SuperKeySpec { lead: depth % k, k }
    }

    #[inline]
    pub fn lead(&self) -> usize {
        self.lead
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// The spec one tree level deeper.
    #[inline]
    pub fn next(&self) -> Self {
        SuperKeySpec {
            lead: (self.lead + 1) % self.k,
            k: self.k,
        }
    }
}

/// Lexicographic comparison of the cyclic coordinate permutations starting
/// at `spec.lead`. Equal iff all k coordinates are equal.
pub fn super_key_compare(a: &[i64], b: &[i64], spec: SuperKeySpec) -> Result<Ordering> {
    if a.len() != spec.k || b.len() != spec.k {
        return Err(KdError::InvalidInput(format!(
            "dimension mismatch: tuples have {} and {} coordinates, spec expects {}",
            a.len(),
            b.len(),
            spec.k
        )));
    }
    Ok(super_key_compare_unchecked(a, b, spec))
}

/// Comparison without the dimension check; callers validate k once up front.
#[inline]
pub fn super_key_compare_unchecked(a: &[i64], b: &[i64], spec: SuperKeySpec) -> Ordering {
    debug_assert_eq!(a.len(), spec.k);
    debug_assert_eq!(b.len(), spec.k);
    let k = spec.k;
    let mut dim = spec.lead;
    for _ in 0..k {
        match a[dim].cmp(&b[dim]) {
            Ordering::Equal => {}
            ord => return ord,
        }
        dim += 1;
        if dim == k {
            dim = 0;
        }
    }
    Ordering::Equal
}

/// Sizes of the low and high sub-arrays around the median of an n-element
/// array: loSize = n/2 and hiSize = (n-1)/2 with truncating division, so
/// loSize + hiSize + 1 == n for both odd and even n.
pub fn median_split_sizes(n: usize) -> Result<(usize, usize)> {
    if n == 0 {
        return Err(KdError::InvalidInput(
            "cannot split an empty array about a median".into(),
        ));
    }
    Ok((n / 2, (n - 1) / 2))
}
