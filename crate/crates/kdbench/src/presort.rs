//! The O(kn log n) builder: k merge-sorted index arrays, stably partitioned
//! about the median of the governing array at each level.
//!
//! Array j is sorted by the super key with lead j. At recursion depth d the
//! governing array is array d mod k; its segment is already partitioned by
//! virtue of being sorted, so only the other k-1 arrays are copied. One
//! shared temp buffer takes the first copy and buffer roles rotate between
//! levels, so a level moves exactly (k-1) * (segment length - 1) elements.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{KdError, Result};
use crate::sort::{merge_sort_by_super_key, presort_and_dedup_into};
use crate::tree::{KdNode, KdTree};
use crate::tuple::{median_split_sizes, super_key_compare_unchecked, Dataset, SuperKeySpec};

/// k index arrays (array j ascending under lead j) plus one scratch array
/// of the same length.
#[derive(Debug, Clone)]
pub struct IndexArraySet {
    pub arrays: Vec<Vec<usize>>,
    pub temp: Vec<usize>,
}

impl IndexArraySet {
    /// Empty set with room for n elements in each of k arrays plus temp.
    pub fn with_capacity(n: usize, k: usize) -> Self {
        IndexArraySet {
            arrays: (0..k).map(|_| Vec::with_capacity(n)).collect(),
            temp: Vec::with_capacity(n),
        }
    }

    /// Number of live (deduplicated) elements.
    pub fn len(&self) -> usize {
        self.arrays.first().map_or(0, |a| a.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Deduplicates the dataset and produces k index arrays of surviving
/// addresses, array j merge-sorted by the super key with lead j.
pub fn presort_index_arrays(ds: &Dataset, threads: usize) -> Result<IndexArraySet> {
    let mut set = IndexArraySet::with_capacity(ds.len(), ds.k());
    presort_index_arrays_into(ds, &mut set, threads)?;
    Ok(set)
}

/// Buffer-reusing form of [`presort_index_arrays`].
pub fn presort_index_arrays_into(
    ds: &Dataset,
    set: &mut IndexArraySet,
    threads: usize,
) -> Result<()> {
    if threads == 0 {
        return Err(KdError::InvalidInput("thread budget must be >= 1".into()));
    }
    let k = ds.k();
    if set.arrays.len() != k {
        return Err(KdError::InvalidInput(format!(
            "index array set has {} arrays, expected k = {k}",
            set.arrays.len()
        )));
    }
    let (first, rest) = set.arrays.split_first_mut().expect("k >= 2");
    presort_and_dedup_into(ds, first, &mut set.temp, threads);
    for (j, a) in rest.iter_mut().enumerate() {
        a.clear();
        a.extend_from_slice(first);
        let spec = SuperKeySpec::for_depth(j + 1, k);
        merge_sort_by_super_key(a, &mut set.temp, ds, spec, threads);
    }
    Ok(())
}

/// Stable partition of `src` about the tuple at address `median` under
/// `spec`: indices whose tuples compare Less are appended to `dst_lo` in
/// src order, Greater to `dst_hi`, and the median itself is skipped.
pub fn stable_partition_about(
    src: &[usize],
    median: usize,
    ds: &Dataset,
    spec: SuperKeySpec,
    dst_lo: &mut Vec<usize>,
    dst_hi: &mut Vec<usize>,
) {
    let med = ds.tuple(median);
    for &id in src {
        match super_key_compare_unchecked(ds.tuple(id), med, spec) {
            Ordering::Less => dst_lo.push(id),
            Ordering::Greater => dst_hi.push(id),
            Ordering::Equal => {}
        }
    }
}

/// Slice-destination form used by the build recursion: `dst` has the same
/// length as `src`; Less elements fill dst[..lo_size] forward, Greater
/// elements fill dst[lo_size+1..] forward, dst[lo_size] receives the
/// median address.
fn partition_into(src: &[usize], median: usize, ds: &Dataset, spec: SuperKeySpec, dst: &mut [usize]) {
    debug_assert_eq!(src.len(), dst.len());
    let med = ds.tuple(median);
    let lo_size = src.len() / 2;
    let mut lo = 0;
    let mut hi = lo_size + 1;
    for &id in src {
        match super_key_compare_unchecked(ds.tuple(id), med, spec) {
            Ordering::Less => {
                dst[lo] = id;
                lo += 1;
            }
            Ordering::Greater => {
                dst[hi] = id;
                hi += 1;
            }
            Ordering::Equal => {}
        }
    }
    debug_assert_eq!(lo, lo_size);
    debug_assert_eq!(hi, dst.len());
    dst[lo_size] = median;
}

/// Dual-threaded variant: one worker scans `src` ascending and fills the
/// low half forward, the other scans descending and fills the high half
/// backward. Write ranges are disjoint and the result is identical to
/// [`partition_into`].
fn partition_into_dual(
    src: &[usize],
    median: usize,
    ds: &Dataset,
    spec: SuperKeySpec,
    dst: &mut [usize],
) {
    debug_assert_eq!(src.len(), dst.len());
    let lo_size = src.len() / 2;
    let (dst_lo, rest) = dst.split_at_mut(lo_size);
    let (dst_med, dst_hi) = rest.split_at_mut(1);
    let med = ds.tuple(median);
    std::thread::scope(|scope| {
        scope.spawn(|| {
            let mut lo = 0;
            for &id in src {
                if super_key_compare_unchecked(ds.tuple(id), med, spec) == Ordering::Less {
                    dst_lo[lo] = id;
                    lo += 1;
                }
            }
            debug_assert_eq!(lo, dst_lo.len());
        });
        let mut hi = dst_hi.len();
        for &id in src.iter().rev() {
            if super_key_compare_unchecked(ds.tuple(id), med, spec) == Ordering::Greater {
                hi -= 1;
                dst_hi[hi] = id;
            }
        }
        debug_assert_eq!(hi, 0);
    });
    dst_med[0] = median;
}

/// Builds a balanced k-d tree by presorting k index arrays and stably
/// partitioning the non-governing arrays about each governing median.
pub fn build_presort(ds: Arc<Dataset>, threads: usize) -> Result<KdTree> {
    let mut set = presort_index_arrays(&ds, threads)?;
    build_presort_from_arrays(ds, &mut set, threads, &mut None)
}

/// Single-threaded instrumented build: also returns the number of element
/// copies performed at each tree level.
pub fn build_presort_counting(ds: Arc<Dataset>) -> Result<(KdTree, Vec<u64>)> {
    let mut set = presort_index_arrays(&ds, 1)?;
    let mut moves = Some(Vec::new());
    let tree = build_presort_from_arrays(ds, &mut set, 1, &mut moves)?;
    Ok((tree, moves.unwrap()))
}

/// Tree construction from presorted index arrays. The set's contents are
/// consumed; re-sort before building again.
pub fn build_presort_from_arrays(
    ds: Arc<Dataset>,
    set: &mut IndexArraySet,
    threads: usize,
    moves: &mut Option<Vec<u64>>,
) -> Result<KdTree> {
    if ds.is_empty() || set.is_empty() {
        return Err(KdError::InvalidInput("dataset is empty".into()));
    }
    if threads == 0 {
        return Err(KdError::InvalidInput("thread budget must be >= 1".into()));
    }
    let n = set.len();
    let k = ds.k();
    let mut bufs: Vec<&mut [usize]> = Vec::with_capacity(k + 1);
    for a in set.arrays.iter_mut() {
        bufs.push(a.as_mut_slice());
    }
    // temp may be longer than the deduplicated element count
    bufs.push(&mut set.temp[..n]);
    let mut counter = moves.as_mut();
    let root = build_rec(
        bufs,
        &ds,
        SuperKeySpec::for_depth(0, k),
        0,
        threads,
        &mut counter,
    );
    Ok(KdTree {
        root,
        n,
        k,
        dataset: ds,
    })
}

const SPAWN_CUTOFF: usize = 256;

fn build_rec(
    mut bufs: Vec<&mut [usize]>,
    ds: &Dataset,
    spec: SuperKeySpec,
    depth: usize,
    threads: usize,
    moves: &mut Option<&mut Vec<u64>>,
) -> Option<Box<KdNode>> {
    let n = bufs[0].len();
    let k = ds.k();
    debug_assert_eq!(bufs.len(), k + 1);
    match n {
        0 => return None,
        // terminal segments come straight from the sorted governing array
        1 => return Some(KdNode::leaf(bufs[0][0])),
        2 => {
            let mut node = KdNode::leaf(bufs[0][1]);
            node.low = Some(KdNode::leaf(bufs[0][0]));
            return Some(node);
        }
        3 => {
            let mut node = KdNode::leaf(bufs[0][1]);
            node.low = Some(KdNode::leaf(bufs[0][0]));
            node.high = Some(KdNode::leaf(bufs[0][2]));
            return Some(node);
        }
        _ => {}
    }

    let (lo_size, _hi_size) = median_split_sizes(n).expect("segment non-empty");
    let median = bufs[0][lo_size];

    // Partition the k-1 non-governing arrays: logical array 1 moves into
    // the free buffer, every later one into its predecessor's buffer.
    let dual = threads >= 2 && n >= SPAWN_CUTOFF;
    for j in 1..k {
        let dst_idx = if j == 1 { k } else { j - 1 };
        let (src, dst) = two_mut(&mut bufs, j, dst_idx);
        if dual {
            partition_into_dual(src, median, ds, spec, dst);
        } else {
            partition_into(src, median, ds, spec, dst);
        }
    }
    if let Some(m) = moves.as_deref_mut() {
        if m.len() <= depth {
            m.resize(depth + 1, 0);
        }
        m[depth] += ((k - 1) * (n - 1)) as u64;
    }

    // Buffer roles for the children: the new governing array (lead+1) sits
    // in the old free buffer, leads +2..+k-1 shift down one buffer, the old
    // governing buffer serves lead+k-1, and buffer k-1 becomes free.
    let mut perm = Vec::with_capacity(k + 1);
    perm.push(k);
    perm.extend(1..k - 1);
    perm.push(0);
    perm.push(k - 1);

    let mut split: Vec<Option<(&mut [usize], &mut [usize])>> = bufs
        .into_iter()
        .map(|b| {
            let (lo, rest) = b.split_at_mut(lo_size);
            let (_, hi) = rest.split_at_mut(1);
            Some((lo, hi))
        })
        .collect();
    let mut lo_bufs = Vec::with_capacity(k + 1);
    let mut hi_bufs = Vec::with_capacity(k + 1);
    for &p in &perm {
        let (lo, hi) = split[p].take().expect("each buffer used once");
        lo_bufs.push(lo);
        hi_bufs.push(hi);
    }

    let next = spec.next();
    let mut node = KdNode::leaf(median);
    if threads > 1 && lo_size >= SPAWN_CUTOFF && moves.is_none() {
        let lo_budget = threads / 2;
        let hi_budget = threads - lo_budget;
        let (low, high) = std::thread::scope(|scope| {
            let handle =
                scope.spawn(|| build_rec(lo_bufs, ds, next, depth + 1, lo_budget, &mut None));
            let high = build_rec(hi_bufs, ds, next, depth + 1, hi_budget, &mut None);
            (handle.join().expect("builder thread panicked"), high)
        });
        node.low = low;
        node.high = high;
    } else {
        node.low = build_rec(lo_bufs, ds, next, depth + 1, threads, moves);
        node.high = build_rec(hi_bufs, ds, next, depth + 1, threads, moves);
    }
    Some(node)
}

/// Disjoint reborrows of two buffers in the set: `src` shared, `dst` mutable.
fn two_mut<'v>(
    bufs: &'v mut [&mut [usize]],
    src: usize,
    dst: usize,
) -> (&'v [usize], &'v mut [usize]) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = bufs.split_at_mut(dst);
        (&a[src][..], &mut *b[0])
    } else {
        let (a, b) = bufs.split_at_mut(src);
        (&b[0][..], &mut *a[dst])
    }
}
