//! Stable merge sort of dataset-index arrays by super key, with optional
//! multi-threaded recursion, plus the duplicate-removal presort pass.

use std::cmp::Ordering;

use crate::tuple::{super_key_compare_unchecked, Dataset, SuperKeySpec};

const INSERTION_CUTOFF: usize = 32;
const PARALLEL_CUTOFF: usize = 4096;

/// Stable merge sort of `ids` (dataset addresses) by the given super key.
/// `scratch` must be at least as long as `ids`. Ties keep the lower input
/// position, so equal tuples stay in ascending-address order when `ids`
/// starts out ascending.
pub fn merge_sort_by_super_key(
    ids: &mut [usize],
    scratch: &mut [usize],
    ds: &Dataset,
    spec: SuperKeySpec,
    threads: usize,
) {
    assert!(scratch.len() >= ids.len());
    let threads = threads.max(1);
    sort_rec(ids, &mut scratch[..ids.len()], ds, spec, threads);
}

fn sort_rec(
    ids: &mut [usize],
    scratch: &mut [usize],
    ds: &Dataset,
    spec: SuperKeySpec,
    threads: usize,
) {
    let n = ids.len();
    if n <= INSERTION_CUTOFF {
        insertion_sort(ids, ds, spec);
        return;
    }
    let mid = n / 2;
    let (lo, hi) = ids.split_at_mut(mid);
    let (slo, shi) = scratch.split_at_mut(mid);
    if threads > 1 && n >= PARALLEL_CUTOFF {
        let lo_budget = threads / 2;
        let hi_budget = threads - lo_budget;
        std::thread::scope(|scope| {
            scope.spawn(|| sort_rec(lo, slo, ds, spec, lo_budget));
            sort_rec(hi, shi, ds, spec, hi_budget);
        });
    } else {
        sort_rec(lo, slo, ds, spec, threads);
        sort_rec(hi, shi, ds, spec, threads);
    }
    merge(lo, hi, scratch, ds, spec);
    ids.copy_from_slice(scratch);
}

fn merge(lo: &[usize], hi: &[usize], out: &mut [usize], ds: &Dataset, spec: SuperKeySpec) {
    let mut i = 0;
    let mut j = 0;
    let mut o = 0;
    while i < lo.len() && j < hi.len() {
        // left-first on Equal keeps the sort stable
        match super_key_compare_unchecked(ds.tuple(lo[i]), ds.tuple(hi[j]), spec) {
            Ordering::Greater => {
                out[o] = hi[j];
                j += 1;
            }
            _ => {
                out[o] = lo[i];
                i += 1;
            }
        }
        o += 1;
    }
    out[o..o + lo.len() - i].copy_from_slice(&lo[i..]);
    o += lo.len() - i;
    out[o..o + hi.len() - j].copy_from_slice(&hi[j..]);
}

pub(crate) fn insertion_sort(ids: &mut [usize], ds: &Dataset, spec: SuperKeySpec) {
    for i in 1..ids.len() {
        let cur = ids[i];
        let mut j = i;
        while j > 0
            && super_key_compare_unchecked(ds.tuple(ids[j - 1]), ds.tuple(cur), spec)
                == Ordering::Greater
        {
            ids[j] = ids[j - 1];
            j -= 1;
        }
        ids[j] = cur;
    }
}

/// Merge-sorts all dataset addresses by the lead-0 super key and removes
/// duplicate tuples, keeping exactly one address per distinct tuple (the
/// lowest dataset address among its duplicates). The result is ascending
/// under lead 0.
pub fn presort_and_dedup(ds: &Dataset, threads: usize) -> Vec<usize> {
    let mut ids = Vec::new();
    let mut scratch = Vec::new();
    presort_and_dedup_into(ds, &mut ids, &mut scratch, threads);
    ids
}

/// Buffer-reusing form of [`presort_and_dedup`] for preallocated runs:
/// `ids` is refilled with 0..n and `scratch` resized before sorting.
pub fn presort_and_dedup_into(
    ds: &Dataset,
    ids: &mut Vec<usize>,
    scratch: &mut Vec<usize>,
    threads: usize,
) {
    let n = ds.len();
    ids.clear();
    ids.extend(0..n);
    scratch.resize(n, 0);
    let spec = SuperKeySpec::for_depth(0, ds.k());
    merge_sort_by_super_key(ids, scratch, ds, spec, threads);
    dedup_sorted(ids, ds, spec);
}

fn dedup_sorted(ids: &mut Vec<usize>, ds: &Dataset, spec: SuperKeySpec) {
    if ids.is_empty() {
        return;
    }
    let mut write = 1;
    for read in 1..ids.len() {
        if super_key_compare_unchecked(ds.tuple(ids[read]), ds.tuple(ids[write - 1]), spec)
            != Ordering::Equal
        {
            ids[write] = ids[read];
            write += 1;
        }
    }
    ids.truncate(write);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::golden_fixture;
    use crate::tuple::Dataset;

    #[test]
    fn fixture_presort_starts_with_expected_addresses() {
        let ds = golden_fixture();
        let ids = presort_and_dedup(&ds, 1);
        assert_eq!(ids.len(), 15);
        assert_eq!(&ids[..3], &[11, 13, 0]);
    }

    #[test]
    fn all_duplicates_collapse_to_one() {
        let tuples: Vec<Vec<i64>> = (0..8).map(|_| vec![4, 5, 6]).collect();
        let ds = Dataset::from_tuples(&tuples, 3).unwrap();
        let ids = presort_and_dedup(&ds, 1);
        assert_eq!(ids, vec![0]);
    }

    #[test]
    fn already_sorted_distinct_is_identity() {
        let tuples: Vec<Vec<i64>> = (0..20).map(|i| vec![i as i64, 0, 0]).collect();
        let ds = Dataset::from_tuples(&tuples, 3).unwrap();
        let ids = presort_and_dedup(&ds, 1);
        assert_eq!(ids, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn dedup_keeps_lowest_address() {
        // duplicates of (1,1) at addresses 0, 2, 4
        let tuples = vec![
            vec![1i64, 1],
            vec![5, 5],
            vec![1, 1],
            vec![3, 3],
            vec![1, 1],
        ];
        let ds = Dataset::from_tuples(&tuples, 2).unwrap();
        let ids = presort_and_dedup(&ds, 1);
        assert_eq!(ids, vec![0, 3, 1]);
    }

    #[test]
    fn dedup_is_idempotent() {
        let tuples = vec![
            vec![1i64, 1],
            vec![5, 5],
            vec![1, 1],
            vec![3, 3],
        ];
        let ds = Dataset::from_tuples(&tuples, 2).unwrap();
        let once = presort_and_dedup(&ds, 1);
        // rebuild a dataset from the survivors and presort again
        let survivors: Vec<Vec<i64>> = once.iter().map(|&i| ds.tuple(i).to_vec()).collect();
        let ds2 = Dataset::from_tuples(&survivors, 2).unwrap();
        let twice = presort_and_dedup(&ds2, 1);
        assert_eq!(twice.len(), once.len());
        for (pos, &id) in twice.iter().enumerate() {
            assert_eq!(ds2.tuple(id), ds.tuple(once[pos]));
        }
    }

    #[test]
    fn parallel_sort_matches_sequential() {
        let n = 10_000;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as i64
        };
        let tuples: Vec<Vec<i64>> = (0..n).map(|_| vec![next(), next(), next()]).collect();
        let ds = Dataset::from_tuples(&tuples, 3).unwrap();
        let seq = presort_and_dedup(&ds, 1);
        let par = presort_and_dedup(&ds, 4);
        assert_eq!(seq, par);
    }
}
