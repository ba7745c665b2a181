//! The O(n log n) builder: median-of-medians selection and partitioning.
//!
//! The first tree level is taken from the merge-sorted, deduplicated address
//! array at no selection cost; every deeper level selects the median of its
//! segment with deterministic median-of-medians recursion (5-element groups),
//! falling back to insertion sort once a segment shrinks below the cutoff and
//! to explicit comparisons for 2- and 3-element segments. Sibling segments
//! are disjoint, so each recursive partition may hand one child to a second
//! thread until the thread budget is spent.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{KdError, Result};
use crate::sort::{insertion_sort, presort_and_dedup};
use crate::tree::{KdNode, KdTree};
use crate::tuple::{median_split_sizes, super_key_compare_unchecked, Dataset, SuperKeySpec};

/// Tuning knobs for the median-of-medians builder.
#[derive(Debug, Clone, Copy)]
pub struct MedianConfig {
    /// Segment length at and below which insertion sort replaces
    /// median-of-medians recursion. Must lie in [5, 64].
    pub insertion_sort_cutoff: usize,
}

impl MedianConfig {
    pub const GROUP_SIZE: usize = 5;

    pub fn new(insertion_sort_cutoff: usize) -> Result<Self> {
        if !(5..=64).contains(&insertion_sort_cutoff) {
            return Err(KdError::InvalidInput(format!(
                "insertion sort cutoff must be in [5, 64], got {insertion_sort_cutoff}"
            )));
        }
        Ok(MedianConfig {
            insertion_sort_cutoff,
        })
    }
}

impl Default for MedianConfig {
    fn default() -> Self {
        // midpoint of the 10-20 element range where insertion sort wins
        MedianConfig {
            insertion_sort_cutoff: 15,
        }
    }
}

/// Returns the dataset address of the 3rd-smallest of five tuples under
/// `spec`, using a fixed six-comparison network.
pub fn median5(ds: &Dataset, spec: SuperKeySpec, refs: [usize; 5]) -> usize {
    refs[median5_offset(ds, spec, &refs)]
}

/// Offset (0..5) within `group` of the median element.
fn median5_offset(ds: &Dataset, spec: SuperKeySpec, group: &[usize]) -> usize {
    debug_assert_eq!(group.len(), 5);
    let less = |i: usize, j: usize| {
        super_key_compare_unchecked(ds.tuple(group[i]), ds.tuple(group[j]), spec)
            == Ordering::Less
    };
    // offsets into `group`; the network permutes these, never the slice
    let (mut a, mut b, mut c, mut d, e) = (0, 1, 2, 3, 4);
    if less(b, a) {
        std::mem::swap(&mut a, &mut b);
    }
    if less(d, c) {
        std::mem::swap(&mut c, &mut d);
    }
    if less(c, a) {
        std::mem::swap(&mut a, &mut c);
        std::mem::swap(&mut b, &mut d);
    }
    // a <= b, a <= c <= d: a is the minimum of the first four, so the
    // overall median is the 2nd smallest of {b, c, d, e}
    let (b, e) = if less(e, b) { (e, b) } else { (b, e) };
    if less(b, c) {
        if less(e, c) {
            e
        } else {
            c
        }
    } else if less(b, d) {
        b
    } else {
        d
    }
}

/// Partitions `ids` in place about its median under `spec`: on return the
/// element of rank loSize sits at index loSize, everything below compares
/// Less and everything above compares Greater. Returns the median's dataset
/// address. Requires tuples distinct under `spec`.
pub fn select_median_and_partition(
    ids: &mut [usize],
    ds: &Dataset,
    spec: SuperKeySpec,
    cfg: &MedianConfig,
) -> Result<usize> {
    if ids.is_empty() {
        return Err(KdError::InvalidInput(
            "cannot select the median of an empty segment".into(),
        ));
    }
    let (lo_size, _) = median_split_sizes(ids.len())?;
    partition_at_rank(ids, lo_size, ds, spec, cfg);
    Ok(ids[lo_size])
}

/// In-place deterministic selection: after return, `ids[rank]` holds the
/// rank-th smallest element, all lower indices compare Less and all higher
/// indices compare Greater.
fn partition_at_rank(
    ids: &mut [usize],
    rank: usize,
    ds: &Dataset,
    spec: SuperKeySpec,
    cfg: &MedianConfig,
) {
    debug_assert!(rank < ids.len());
    let n = ids.len();
    match n {
        1 => return,
        2 => {
            if super_key_compare_unchecked(ds.tuple(ids[1]), ds.tuple(ids[0]), spec)
                == Ordering::Less
            {
                ids.swap(0, 1);
            }
            return;
        }
        3 => {
            // explicit comparisons for the 3-element case
            if super_key_compare_unchecked(ds.tuple(ids[1]), ds.tuple(ids[0]), spec)
                == Ordering::Less
            {
                ids.swap(0, 1);
            }
            if super_key_compare_unchecked(ds.tuple(ids[2]), ds.tuple(ids[1]), spec)
                == Ordering::Less
            {
                ids.swap(1, 2);
                if super_key_compare_unchecked(ds.tuple(ids[1]), ds.tuple(ids[0]), spec)
                    == Ordering::Less
                {
                    ids.swap(0, 1);
                }
            }
            return;
        }
        _ => {}
    }
    if n <= cfg.insertion_sort_cutoff {
        insertion_sort(ids, ds, spec);
        return;
    }

    // gather the medians of 5-element groups into the segment prefix
    let groups = (n + 4) / 5;
    for g in 0..groups {
        let start = g * 5;
        let len = (n - start).min(5);
        let med_off = if len == 5 {
            median5_offset(ds, spec, &ids[start..start + 5])
        } else {
            insertion_sort(&mut ids[start..start + len], ds, spec);
            (len - 1) / 2
        };
        ids.swap(g, start + med_off);
    }
    // pivot = median of the group medians
    let pivot_rank = (groups - 1) / 2;
    partition_at_rank(&mut ids[..groups], pivot_rank, ds, spec, cfg);
    let p = partition_around(ids, pivot_rank, ds, spec);
    match rank.cmp(&p) {
        Ordering::Equal => {}
        Ordering::Less => partition_at_rank(&mut ids[..p], rank, ds, spec, cfg),
        Ordering::Greater => partition_at_rank(&mut ids[p + 1..], rank - p - 1, ds, spec, cfg),
    }
}

/// Lomuto partition about the element at `pivot_pos`; returns the pivot's
/// final index. Keys are distinct, so the split is exact.
fn partition_around(ids: &mut [usize], pivot_pos: usize, ds: &Dataset, spec: SuperKeySpec) -> usize {
    let last = ids.len() - 1;
    ids.swap(pivot_pos, last);
    let pivot = ids[last];
    let mut store = 0;
    for i in 0..last {
        if super_key_compare_unchecked(ds.tuple(ids[i]), ds.tuple(pivot), spec) == Ordering::Less {
            ids.swap(i, store);
            store += 1;
        }
    }
    ids.swap(store, last);
    store
}

/// Builds a balanced k-d tree over the deduplicated dataset via
/// median-of-medians partitioning.
pub fn build_medians(ds: Arc<Dataset>, threads: usize, cfg: &MedianConfig) -> Result<KdTree> {
    if ds.is_empty() {
        return Err(KdError::InvalidInput("dataset is empty".into()));
    }
    if threads == 0 {
        return Err(KdError::InvalidInput("thread budget must be >= 1".into()));
    }
    let mut ids = presort_and_dedup(&ds, threads);
    build_medians_from_sorted(ds, &mut ids, threads, cfg)
}

/// Tree construction from an already sorted, deduplicated address array
/// (the output of [`presort_and_dedup`]). Level 0 splits the sorted array
/// at rank loSize with no selection work.
pub fn build_medians_from_sorted(
    ds: Arc<Dataset>,
    ids: &mut [usize],
    threads: usize,
    cfg: &MedianConfig,
) -> Result<KdTree> {
    if ids.is_empty() {
        return Err(KdError::InvalidInput("dataset is empty".into()));
    }
    let n = ids.len();
    let (lo_size, _) = median_split_sizes(n)?;
    let (lo, rest) = ids.split_at_mut(lo_size);
    let (median, hi) = rest.split_first_mut().unwrap();
    let depth1 = SuperKeySpec::for_depth(1, ds.k());
    let mut root = Box::new(KdNode {
        tuple_index: *median,
        low: None,
        high: None,
    });
    let (low, high) = build_pair(lo, hi, &ds, depth1, cfg, threads);
    root.low = low;
    root.high = high;
    Ok(KdTree {
        root: Some(root),
        n,
        k: ds.k(),
        dataset: ds,
    })
}

/// Minimum segment length worth handing to another thread.
const SPAWN_CUTOFF: usize = 256;

fn build_pair(
    lo: &mut [usize],
    hi: &mut [usize],
    ds: &Dataset,
    spec: SuperKeySpec,
    cfg: &MedianConfig,
    threads: usize,
) -> (Option<Box<KdNode>>, Option<Box<KdNode>>) {
    if threads > 1 && lo.len().min(hi.len()) >= SPAWN_CUTOFF {
        let lo_budget = threads / 2;
        let hi_budget = threads - lo_budget;
        std::thread::scope(|scope| {
            let handle = scope.spawn(|| build_segment(lo, ds, spec, cfg, lo_budget));
            let high = build_segment(hi, ds, spec, cfg, hi_budget);
            (handle.join().expect("builder thread panicked"), high)
        })
    } else {
        (
            build_segment(lo, ds, spec, cfg, threads),
            build_segment(hi, ds, spec, cfg, threads),
        )
    }
}

fn build_segment(
    ids: &mut [usize],
    ds: &Dataset,
    spec: SuperKeySpec,
    cfg: &MedianConfig,
    threads: usize,
) -> Option<Box<KdNode>> {
    if ids.is_empty() {
        return None;
    }
    let (lo_size, _) = median_split_sizes(ids.len()).expect("non-empty segment");
    partition_at_rank(ids, lo_size, ds, spec, cfg);
    let (lo, rest) = ids.split_at_mut(lo_size);
    let (median, hi) = rest.split_first_mut().unwrap();
    let mut node = Box::new(KdNode {
        tuple_index: *median,
        low: None,
        high: None,
    });
    let (low, high) = build_pair(lo, hi, ds, spec.next(), cfg, threads);
    node.low = low;
    node.high = high;
    Some(node)
}
