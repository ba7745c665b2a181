//! The O(kn log n) + O(n log n) builder: partitions are *registered* in the
//! BN/SS/CUR arrays instead of copying index-array elements, then the tree
//! is built in O(n) from the final (F) permutation.
//!
//! BN[i] holds the start index of the sub-array element i currently belongs
//! to, and doubles as the median-position marker. SS[s] holds the size of
//! the live sub-array starting at s; 0 at a median position is the sentinel
//! for a registered median. CUR[s] counts how many elements of sub-array s
//! the current pass has retrieved, which routes each element to the low
//! half, the high half, or the median slot. The zc counter tracks
//! registered medians; partitioning completes when it reaches n.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{KdError, Result};
use crate::presort::presort_index_arrays;
use crate::tree::{KdNode, KdTree};
use crate::tuple::Dataset;

/// Inner-loop execution mode for a registration pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// Strictly sequential inner loop: the tmpI -> BN -> SS dependent loads
    /// force serial order.
    Single,
    /// Two workers: one scans the index array ascending from the lowest
    /// address, the other descending from the highest. Each owns a private
    /// counter array; BN writes target disjoint elements; SS is read-only
    /// during the pass with splits applied at the pass boundary; zc is
    /// atomic. Output is identical to single mode.
    Dual,
}

impl std::fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PartitionMode::Single => "single",
            PartitionMode::Dual => "dual",
        })
    }
}

impl std::str::FromStr for PartitionMode {
    type Err = KdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(PartitionMode::Single),
            "dual" => Ok(PartitionMode::Dual),
            other => Err(KdError::InvalidInput(format!(
                "unknown partition mode {other:?} (expected single or dual)"
            ))),
        }
    }
}

/// The registration arrays plus pass bookkeeping.
#[derive(Debug, Clone)]
pub struct RegistrationState {
    pub bn: Vec<usize>,
    pub ss: Vec<usize>,
    pub cur: Vec<usize>,
    /// Count of registered medians; partitioning is complete when zc == n.
    pub zc: usize,
    pub n: usize,
    /// Completed registration passes.
    pub passes: usize,
    /// Index retrievals performed, including skipped medians.
    pub retrievals: u64,
}

impl RegistrationState {
    /// One comma-separated row each for bn, ss, and cur, for diffing a
    /// pass-by-pass walk-through.
    pub fn snapshot_csv(&self) -> String {
        let row = |name: &str, v: &[usize]| {
            let mut line = String::from(name);
            for x in v {
                line.push(',');
                line.push_str(&x.to_string());
            }
            line.push('\n');
            line
        };
        let mut out = row("bn", &self.bn);
        out.push_str(&row("ss", &self.ss));
        out.push_str(&row("cur", &self.cur));
        out
    }

    pub fn is_complete(&self) -> bool {
        self.zc == self.n
    }

    /// Returns the state to its freshly initialized form, reusing the
    /// existing allocations.
    pub fn reset(&mut self) {
        self.bn.fill(0);
        self.ss.fill(0);
        self.ss[0] = self.n;
        self.cur.fill(0);
        self.zc = 0;
        self.passes = 0;
        self.retrievals = 0;
    }
}

/// Fresh state for n elements: one live sub-array covering everything.
pub fn init_registration(n: usize) -> Result<RegistrationState> {
    if n == 0 {
        return Err(KdError::InvalidInput(
            "cannot initialize registration for zero elements".into(),
        ));
    }
    let mut ss = vec![0usize; n];
    ss[0] = n;
    Ok(RegistrationState {
        bn: vec![0; n],
        ss,
        cur: vec![0; n],
        zc: 0,
        n,
        passes: 0,
        retrievals: 0,
    })
}

/// One sequential pass over one sorted index array. Each retrieved element
/// is re-assigned to its sub-array's low half, high half, or median slot;
/// a sub-array splits as soon as its last element has been counted.
pub fn registration_pass(state: &mut RegistrationState, index_array: &[usize]) -> Result<()> {
    if state.is_complete() {
        return Err(KdError::InvalidInput(
            "registration is already complete".into(),
        ));
    }
    if index_array.len() != state.n {
        return Err(KdError::InvalidInput(format!(
            "index array length {} does not match n = {}",
            index_array.len(),
            state.n
        )));
    }
    for &tmp_i in index_array {
        state.retrievals += 1;
        let tmp_bn = state.bn[tmp_i];
        let tmp_size = state.ss[tmp_bn];
        if tmp_size == 0 {
            // already a registered median from an earlier pass
            continue;
        }
        let lo_size = tmp_size / 2;
        let hi_size = (tmp_size - 1) / 2;
        let lo_begin = tmp_bn;
        let median = tmp_bn + lo_size;
        let hi_begin = median + 1;
        let count = state.cur[tmp_bn];
        if count >= tmp_size {
            return Err(KdError::InternalConsistency(format!(
                "sub-array at {tmp_bn} counted {count} elements but has size {tmp_size}"
            )));
        }
        if count < lo_size {
            state.bn[tmp_i] = lo_begin;
        } else if count > lo_size {
            state.bn[tmp_i] = hi_begin;
        } else {
            state.bn[tmp_i] = median;
            state.ss[median] = 0;
            state.zc += 1;
        }
        state.cur[tmp_bn] = count + 1;
        if count + 1 == tmp_size && tmp_size > 1 {
            state.ss[lo_begin] = lo_size;
            state.cur[lo_begin] = 0;
            if hi_size > 0 {
                state.ss[hi_begin] = hi_size;
                state.cur[hi_begin] = 0;
            }
        }
    }
    state.passes += 1;
    Ok(())
}

/// Dual-threaded pass. Routing needs only each worker's own counter: the
/// ascending worker's rank for an element is its private count, and the
/// descending worker's rank is size - 1 - count, because a prefix (suffix)
/// of the sorted order contains every same-sub-array element that precedes
/// (follows) the one in hand. Splits are applied at the pass boundary from
/// the list of sub-arrays that were live when the pass started.
fn registration_pass_dual(
    state: &mut RegistrationState,
    index_array: &[usize],
    cur_b: &mut [usize],
) -> Result<()> {
    if state.is_complete() {
        return Err(KdError::InvalidInput(
            "registration is already complete".into(),
        ));
    }
    let n = state.n;
    if index_array.len() != n {
        return Err(KdError::InvalidInput(format!(
            "index array length {} does not match n = {n}",
            index_array.len()
        )));
    }
    let live: Vec<(usize, usize)> = (0..n)
        .filter(|&s| state.ss[s] > 0)
        .map(|s| (s, state.ss[s]))
        .collect();

    let (lo_half, hi_half) = index_array.split_at(n / 2);
    let zc = AtomicUsize::new(state.zc);
    let bn = as_atomic(&mut state.bn);
    let ss: &[usize] = &state.ss;
    let cur_a: &mut [usize] = &mut state.cur;

    let (err_a, err_b) = std::thread::scope(|scope| {
        let handle = scope.spawn(|| scan_half(lo_half, bn, ss, cur_a, &zc, false));
        let err_b = scan_half(hi_half, bn, ss, cur_b, &zc, true);
        (handle.join().expect("partition worker panicked"), err_b)
    });
    err_a?;
    err_b?;

    state.zc = zc.into_inner();
    for (start, size) in live {
        let lo_size = size / 2;
        let hi_size = (size - 1) / 2;
        let median = start + lo_size;
        state.ss[median] = 0;
        if size > 1 {
            state.ss[start] = lo_size;
            state.cur[start] = 0;
            cur_b[start] = 0;
            if hi_size > 0 {
                state.ss[median + 1] = hi_size;
                state.cur[median + 1] = 0;
                cur_b[median + 1] = 0;
            }
        }
    }
    state.passes += 1;
    state.retrievals += n as u64;
    Ok(())
}

/// One worker's half of a dual pass. `descending` selects the high half's
/// reverse scan and rank formula.
fn scan_half(
    half: &[usize],
    bn: &[AtomicUsize],
    ss: &[usize],
    cur: &mut [usize],
    zc: &AtomicUsize,
    descending: bool,
) -> Result<()> {
    let mut process = |tmp_i: usize| -> Result<()> {
        let tmp_bn = bn[tmp_i].load(AtomicOrdering::Relaxed);
        let tmp_size = ss[tmp_bn];
        if tmp_size == 0 {
            return Ok(());
        }
        let lo_size = tmp_size / 2;
        let count = cur[tmp_bn];
        if count >= tmp_size {
            return Err(KdError::InternalConsistency(format!(
                "sub-array at {tmp_bn} counted {count} elements but has size {tmp_size}"
            )));
        }
        cur[tmp_bn] = count + 1;
        let rank = if descending {
            tmp_size - 1 - count
        } else {
            count
        };
        let new_bn = if rank < lo_size {
            tmp_bn
        } else if rank > lo_size {
            tmp_bn + lo_size + 1
        } else {
            zc.fetch_add(1, AtomicOrdering::Relaxed);
            tmp_bn + lo_size
        };
        bn[tmp_i].store(new_bn, AtomicOrdering::Relaxed);
        Ok(())
    };
    if descending {
        for &tmp_i in half.iter().rev() {
            process(tmp_i)?;
        }
    } else {
        for &tmp_i in half {
            process(tmp_i)?;
        }
    }
    Ok(())
}

/// AtomicUsize has the same in-memory representation as usize, and the
/// exclusive borrow guarantees no other unsynchronized access.
fn as_atomic(v: &mut [usize]) -> &[AtomicUsize] {
    unsafe { std::slice::from_raw_parts(v.as_mut_ptr() as *const AtomicUsize, v.len()) }
}

/// Cycles registration passes over the index arrays (in lead order 0, 1,
/// ..., k-1, 0, ...) until every element is a registered median.
pub fn partition_all(
    state: &mut RegistrationState,
    index_arrays: &[Vec<usize>],
    mode: PartitionMode,
) -> Result<()> {
    if index_arrays.is_empty() {
        return Err(KdError::InvalidInput("no index arrays".into()));
    }
    let n = state.n;
    let max_passes = ceil_log2(n) + 2;
    let mut cur_b = match mode {
        PartitionMode::Single => Vec::new(),
        PartitionMode::Dual => vec![0usize; n],
    };
    let mut which = 0;
    while !state.is_complete() {
        if state.passes >= max_passes {
            return Err(KdError::InternalConsistency(format!(
                "partitioning did not complete after {} passes (zc = {} of {n})",
                state.passes, state.zc
            )));
        }
        match mode {
            PartitionMode::Single => registration_pass(state, &index_arrays[which])?,
            PartitionMode::Dual => {
                registration_pass_dual(state, &index_arrays[which], &mut cur_b)?
            }
        }
        which = (which + 1) % index_arrays.len();
    }
    Ok(())
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (n - 1).ilog2() as usize + 1
    }
}

/// The final permutation: f[bn[i]] = i for every element i.
pub fn build_final_array(state: &RegistrationState) -> Result<Vec<usize>> {
    if !state.is_complete() {
        return Err(KdError::InvalidInput(format!(
            "registration incomplete: zc = {} of {}",
            state.zc, state.n
        )));
    }
    let n = state.n;
    let mut f = vec![usize::MAX; n];
    for i in 0..n {
        let pos = state.bn[i];
        if pos >= n || f[pos] != usize::MAX {
            return Err(KdError::InternalConsistency(format!(
                "BN is not a permutation: position {pos} assigned twice or out of range"
            )));
        }
        f[pos] = i;
    }
    Ok(f)
}

/// O(n) tree construction by recursive subdivision of the F array. The
/// element at rank loSize of each segment becomes the node; 1- to
/// 3-element segments convert directly.
pub fn build_tree_from_f(f: &[usize], ds: Arc<Dataset>) -> Result<KdTree> {
    if f.is_empty() {
        return Err(KdError::InvalidInput("final array is empty".into()));
    }
    let root = subdivide(f);
    Ok(KdTree {
        root,
        n: f.len(),
        k: ds.k(),
        dataset: ds,
    })
}

fn subdivide(f: &[usize]) -> Option<Box<KdNode>> {
    match f.len() {
        0 => None,
        1 => Some(KdNode::leaf(f[0])),
        2 => {
            let mut node = KdNode::leaf(f[1]);
            node.low = Some(KdNode::leaf(f[0]));
            Some(node)
        }
        3 => {
            let mut node = KdNode::leaf(f[1]);
            node.low = Some(KdNode::leaf(f[0]));
            node.high = Some(KdNode::leaf(f[2]));
            Some(node)
        }
        n => {
            let lo_size = n / 2;
            let mut node = KdNode::leaf(f[lo_size]);
            node.low = subdivide(&f[..lo_size]);
            node.high = subdivide(&f[lo_size + 1..]);
            Some(node)
        }
    }
}

/// Index arrays in dense element ids (0..m, ascending by dataset address
/// among deduplicated survivors), plus the dense-to-address map. For a
/// duplicate-free dataset the mapping is the identity.
pub fn presort_dense_arrays(
    ds: &Dataset,
    threads: usize,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let set = presort_index_arrays(ds, threads)?;
    let mut dense_to_addr = set.arrays[0].clone();
    dense_to_addr.sort_unstable();
    let mut dense_of = vec![usize::MAX; ds.len()];
    for (dense, &addr) in dense_to_addr.iter().enumerate() {
        dense_of[addr] = dense;
    }
    let arrays = set
        .arrays
        .into_iter()
        .map(|a| a.into_iter().map(|addr| dense_of[addr]).collect())
        .collect();
    Ok((arrays, dense_to_addr))
}

/// Full pipeline: presort, registration partitioning, F array, O(n) build.
pub fn build_registration(
    ds: Arc<Dataset>,
    threads: usize,
    mode: PartitionMode,
) -> Result<KdTree> {
    if ds.is_empty() {
        return Err(KdError::InvalidInput("dataset is empty".into()));
    }
    if threads == 0 {
        return Err(KdError::InvalidInput("thread budget must be >= 1".into()));
    }
    if mode == PartitionMode::Dual && threads < 2 {
        return Err(KdError::InvalidInput(
            "dual partition mode requires a thread budget of at least 2".into(),
        ));
    }
    let (arrays, dense_to_addr) = presort_dense_arrays(&ds, threads)?;
    let mut state = init_registration(dense_to_addr.len())?;
    partition_all(&mut state, &arrays, mode)?;
    let f = build_final_array(&state)?;
    let f_addr: Vec<usize> = f.into_iter().map(|d| dense_to_addr[d]).collect();
    build_tree_from_f(&f_addr, ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::golden_fixture;
    use crate::medians::{build_medians, MedianConfig};
    use crate::tree::verify_tree;

    #[test]
    fn init_matches_walkthrough() {
        let st = init_registration(15).unwrap();
        assert_eq!(st.bn, vec![0; 15]);
        assert_eq!(st.ss[0], 15);
        assert!(st.ss[1..].iter().all(|&s| s == 0));
        assert_eq!(st.zc, 0);
        assert!(init_registration(0).is_err());
        assert_eq!(init_registration(1).unwrap().ss, vec![1]);
        assert_eq!(init_registration(2).unwrap().bn, vec![0, 0]);
    }

    #[test]
    fn fixture_passes_match_walkthrough() {
        let ds = golden_fixture();
        let (arrays, _) = presort_dense_arrays(&ds, 1).unwrap();
        let mut st = init_registration(15).unwrap();

        registration_pass(&mut st, &arrays[0]).unwrap();
        assert_eq!(st.ss[0], 7);
        assert_eq!(st.ss[7], 0);
        assert_eq!(st.ss[8], 7);
        assert_eq!(st.bn[5], 7);
        assert_eq!(st.bn[0], 0);
        assert_eq!(st.bn[2], 8);
        assert_eq!(st.bn[13], 0);

        registration_pass(&mut st, &arrays[1]).unwrap();
        assert_eq!(st.ss[3], 0);
        assert_eq!(st.ss[0], 3);
        assert_eq!(st.ss[4], 3);
        assert_eq!(st.ss[11], 0);
        assert_eq!(st.ss[8], 3);
        assert_eq!(st.ss[12], 3);
        assert_eq!(st.bn[13], 0);
        assert_eq!(st.bn[4], 8);
        assert_eq!(st.bn[8], 12);
        assert_eq!(st.bn[3], 4);

        registration_pass(&mut st, &arrays[2]).unwrap();
        let zeros = st.ss.iter().filter(|&&s| s == 0).count();
        let ones = st.ss.iter().filter(|&&s| s == 1).count();
        assert_eq!((zeros, ones), (7, 8));

        registration_pass(&mut st, &arrays[0]).unwrap();
        assert_eq!(st.zc, 15);
        assert_eq!(st.passes, 4);
    }

    #[test]
    fn singleton_registers_in_one_pass() {
        let mut st = init_registration(1).unwrap();
        registration_pass(&mut st, &[0]).unwrap();
        assert_eq!(st.zc, 1);
        assert_eq!(st.ss, vec![0]);
    }

    #[test]
    fn final_array_matches_walkthrough() {
        let ds = golden_fixture();
        let (arrays, _) = presort_dense_arrays(&ds, 1).unwrap();
        let mut st = init_registration(15).unwrap();
        partition_all(&mut st, &arrays, PartitionMode::Single).unwrap();
        let f = build_final_array(&st).unwrap();
        assert_eq!(f[7], 5);
        assert_eq!(f[3], 1);
        assert_eq!(f[11], 12);
    }

    #[test]
    fn final_array_of_singleton() {
        let mut st = init_registration(1).unwrap();
        registration_pass(&mut st, &[0]).unwrap();
        assert_eq!(build_final_array(&st).unwrap(), vec![0]);
    }

    #[test]
    fn incomplete_state_refuses_final_array() {
        let st = init_registration(15).unwrap();
        assert!(build_final_array(&st).is_err());
    }

    #[test]
    fn live_sizes_plus_medians_account_for_everything() {
        let ds = crate::medians::tests::random_dataset(500, 3, 21);
        let (arrays, _) = presort_dense_arrays(&ds, 1).unwrap();
        let n = arrays[0].len();
        let mut st = init_registration(n).unwrap();
        let mut which = 0;
        while !st.is_complete() {
            registration_pass(&mut st, &arrays[which]).unwrap();
            which = (which + 1) % arrays.len();
            let live: usize = st.ss.iter().sum();
            assert_eq!(live + st.zc, n);
        }
    }

    #[test]
    fn dual_mode_matches_single_mode() {
        for (n, k) in [(15usize, 3usize), (64, 2), (1000, 3), (4096, 5)] {
            let ds = if n == 15 {
                golden_fixture()
            } else {
                crate::medians::tests::random_dataset(n, k, (n + k) as u64)
            };
            let (arrays, _) = presort_dense_arrays(&ds, 1).unwrap();
            let m = arrays[0].len();
            let mut single = init_registration(m).unwrap();
            partition_all(&mut single, &arrays, PartitionMode::Single).unwrap();
            let mut dual = init_registration(m).unwrap();
            partition_all(&mut dual, &arrays, PartitionMode::Dual).unwrap();
            assert_eq!(single.bn, dual.bn, "n={n} k={k}");
            assert_eq!(single.ss, dual.ss, "n={n} k={k}");
            assert_eq!(single.zc, dual.zc);
            assert_eq!(
                build_final_array(&single).unwrap(),
                build_final_array(&dual).unwrap()
            );
        }
    }

    #[test]
    fn tree_from_f_in_order_traversal_recovers_f() {
        let tuples: Vec<Vec<i64>> = (0..11).map(|i| vec![i as i64, -(i as i64)]).collect();
        let ds = Arc::new(Dataset::from_tuples(&tuples, 2).unwrap());
        let f: Vec<usize> = vec![3, 7, 1, 0, 9, 4, 2, 10, 5, 8, 6];
        let tree = build_tree_from_f(&f, ds).unwrap();
        let mut visited = Vec::new();
        fn in_order(node: &KdNode, out: &mut Vec<usize>) {
            if let Some(l) = &node.low {
                in_order(l, out);
            }
            out.push(node.tuple_index);
            if let Some(h) = &node.high {
                in_order(h, out);
            }
        }
        in_order(tree.root.as_ref().unwrap(), &mut visited);
        assert_eq!(visited, f);
    }

    #[test]
    fn fixture_tree_matches_medians_builder() {
        let ds = Arc::new(golden_fixture());
        let a = build_medians(ds.clone(), 1, &MedianConfig::default()).unwrap();
        for mode in [PartitionMode::Single, PartitionMode::Dual] {
            let b = build_registration(ds.clone(), 2, mode).unwrap();
            assert!(a.same_structure(&b));
            assert!(verify_tree(&b).is_valid());
            let root = b.root.as_ref().unwrap();
            assert_eq!(ds.tuple(root.tuple_index), &[7, 2, 6]);
            let d1_low = root.low.as_ref().unwrap();
            let d1_high = root.high.as_ref().unwrap();
            // depth-1 tuples come from addresses 1 and 12
            assert_eq!(d1_low.tuple_index, 1);
            assert_eq!(d1_high.tuple_index, 12);
        }
    }

    #[test]
    fn large_random_build_verifies() {
        let ds = Arc::new(crate::medians::tests::random_dataset(1 << 13, 3, 5));
        let tree = build_registration(ds, 1, PartitionMode::Single).unwrap();
        assert!(verify_tree(&tree).is_valid());
    }
}
