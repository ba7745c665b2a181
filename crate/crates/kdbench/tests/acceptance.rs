//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS / WARN line (visible with `--nocapture`). Criteria marked
//! environment-dependent (6, 8, 9) warn instead of failing, since their
//! outcomes depend on the host's core count and load.

use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use kdbench::bench::{run_benchmark, Algorithm, BenchParams};
use kdbench::datagen::{generate_tuples, GenSpec};
use kdbench::fixture::golden_fixture;
use kdbench::medians::{build_medians, select_median_and_partition, MedianConfig};
use kdbench::presort::build_presort;
use kdbench::registration::{
    build_final_array, build_registration, init_registration, partition_all,
    presort_dense_arrays, registration_pass, PartitionMode,
};
use kdbench::tree::{verify_tree, KdTree};
use kdbench::tuple::{median_split_sizes, super_key_compare, Dataset, SuperKeySpec};

/// Serializes the wall-clock-sensitive criteria so parallel test
/// execution does not distort their timings.
fn timing_lock() -> std::sync::MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

fn build_all(ds: &Arc<Dataset>, threads: usize) -> [KdTree; 3] {
    [
        build_medians(ds.clone(), threads, &MedianConfig::default()).unwrap(),
        build_presort(ds.clone(), threads).unwrap(),
        build_registration(ds.clone(), threads, PartitionMode::Single).unwrap(),
    ]
}

fn tuple_at<'a>(tree: &KdTree, ds: &'a Dataset, path: &[u8]) -> &'a [i64] {
    let mut node = tree.root.as_ref().expect("non-empty tree");
    for &step in path {
        node = match step {
            0 => node.low.as_ref().expect("low child"),
            _ => node.high.as_ref().expect("high child"),
        };
    }
    ds.tuple(node.tuple_index)
}

#[test]
fn criterion_01_golden_fixture_tree() {
    let ds = Arc::new(golden_fixture());
    let start = Instant::now();
    let trees = build_all(&ds, 1);
    let elapsed = start.elapsed();
    for (tree, name) in trees.iter().zip(["medians", "presort", "registration"]) {
        assert!(verify_tree(tree).is_valid(), "{name} tree fails verification");
        assert_eq!(tuple_at(tree, &ds, &[]), &[7, 2, 6], "{name} root");
        assert_eq!(tuple_at(tree, &ds, &[0]), &[5, 4, 2], "{name} low");
        assert_eq!(tuple_at(tree, &ds, &[1]), &[9, 5, 3], "{name} high");
        assert_eq!(tuple_at(tree, &ds, &[0, 0]), &[2, 1, 3], "{name} low-low");
        assert_eq!(tuple_at(tree, &ds, &[0, 1]), &[1, 6, 8], "{name} low-high");
        assert_eq!(tuple_at(tree, &ds, &[1, 0]), &[8, 3, 2], "{name} high-low");
        assert_eq!(tuple_at(tree, &ds, &[1, 1]), &[9, 6, 7], "{name} high-high");
    }
    assert!(
        elapsed.as_millis() < 1,
        "fixture builds took {elapsed:?}, expected < 1 ms"
    );
    println!("criterion 1: PASS - golden fixture tree identical across all builders ({elapsed:?})");
}

#[test]
fn criterion_02_registration_walkthrough() {
    let ds = golden_fixture();
    let (arrays, dense_to_addr) = presort_dense_arrays(&ds, 1).unwrap();
    // the fixture is duplicate-free, so dense ids are dataset addresses
    assert_eq!(dense_to_addr, (0..15).collect::<Vec<_>>());
    let mut state = init_registration(15).unwrap();

    registration_pass(&mut state, &arrays[0]).unwrap();
    assert_eq!(state.ss[0], 7);
    assert_eq!(state.ss[7], 0);
    assert_eq!(state.ss[8], 7);
    assert_eq!(state.bn[5], 7);
    assert_eq!(state.bn[2], 8);

    registration_pass(&mut state, &arrays[1]).unwrap();
    assert_eq!(state.ss[3], 0);
    assert_eq!(state.ss[4], 3);
    assert_eq!(state.ss[11], 0);
    assert_eq!(state.ss[12], 3);
    assert_eq!(state.bn[8], 12);
    assert_eq!(state.bn[3], 4);

    registration_pass(&mut state, &arrays[2]).unwrap();
    registration_pass(&mut state, &arrays[0]).unwrap();
    assert!(state.is_complete());
    assert_eq!(state.passes, 4);
    assert_eq!(state.zc, 15);

    let f = build_final_array(&state).unwrap();
    assert_eq!(f[7], 5);
    assert_eq!(f[3], 1);
    assert_eq!(f[11], 12);
    println!("criterion 2: PASS - registration walkthrough matches pass-by-pass values");
}

#[test]
fn criterion_03_cross_builder_equivalence() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in [15usize, 64, 1000, 1 << 12] {
        for k in [2usize, 3, 5] {
            for trial in 0..50u64 {
                let seed = 0x9e37 + trial * 1000 + (n as u64) * 7 + k as u64;
                let ds = Arc::new(generate_tuples(GenSpec::new(n, k, seed).unwrap()));
                let [a, b, c] = build_all(&ds, 1);
                assert!(verify_tree(&a).is_valid(), "n={n} k={k} trial={trial}");
                assert!(
                    a.same_structure(&b),
                    "medians vs presort diverged at n={n} k={k} trial={trial}"
                );
                assert!(
                    a.same_structure(&c),
                    "medians vs registration diverged at n={n} k={k} trial={trial}"
                );
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}, budget 30 s");
    println!(
        "criterion 3: PASS - {checked} random datasets built identically by all builders ({elapsed:?})"
    );
}

#[test]
fn criterion_04_selection_oracle() {
    let start = Instant::now();
    let cfg = MedianConfig::default();
    let k = 3;
    for len in 1usize..=200 {
        for trial in 0..20u64 {
            let seed = (len as u64) * 37 + trial;
            let ds = generate_tuples(GenSpec::new(len, k, seed).unwrap());
            let spec = SuperKeySpec::new((trial as usize) % k, k).unwrap();
            let mut ids: Vec<usize> = (0..len).collect();
            let median = select_median_and_partition(&mut ids, &ds, spec, &cfg).unwrap();

            let mut sorted: Vec<usize> = (0..len).collect();
            sorted.sort_by(|&a, &b| {
                super_key_compare(ds.tuple(a), ds.tuple(b), spec).unwrap()
            });
            let (lo_size, _) = median_split_sizes(len).unwrap();
            assert_eq!(median, sorted[lo_size], "median identity, len={len}");

            let mut lo: Vec<usize> = ids[..lo_size].to_vec();
            lo.sort_unstable();
            let mut lo_oracle: Vec<usize> = sorted[..lo_size].to_vec();
            lo_oracle.sort_unstable();
            assert_eq!(lo, lo_oracle, "lo membership, len={len}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}, budget 5 s");
    println!("criterion 4: PASS - selection agrees with full-sort oracle for lengths 1..200 ({elapsed:?})");
}

#[test]
fn criterion_05_thread_determinism() {
    let start = Instant::now();
    let ds = Arc::new(generate_tuples(GenSpec::with_default_seed(1 << 16, 3).unwrap()));
    let base = build_all(&ds, 1);
    for threads in [2usize, 4, 8] {
        let trees = build_all(&ds, threads);
        for (b, t) in base.iter().zip(&trees) {
            assert!(b.same_structure(t), "threads={threads} changed a tree");
        }
    }

    // single vs dual registration: identical bn, ss, f, and tree
    let (arrays, _) = presort_dense_arrays(&ds, 4).unwrap();
    let mut single = init_registration(ds.len()).unwrap();
    partition_all(&mut single, &arrays, PartitionMode::Single).unwrap();
    let mut dual = init_registration(ds.len()).unwrap();
    partition_all(&mut dual, &arrays, PartitionMode::Dual).unwrap();
    assert_eq!(single.bn, dual.bn, "bn differs between modes");
    assert_eq!(single.ss, dual.ss, "ss differs between modes");
    let f_single = build_final_array(&single).unwrap();
    let f_dual = build_final_array(&dual).unwrap();
    assert_eq!(f_single, f_dual, "f differs between modes");
    let dual_tree = build_registration(ds.clone(), 4, PartitionMode::Dual).unwrap();
    assert!(base[2].same_structure(&dual_tree), "dual-mode tree differs");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}, budget 30 s");
    println!("criterion 5: PASS - identical trees for threads 1/2/4/8 and single/dual parity ({elapsed:?})");
}

#[test]
fn criterion_06_dual_mode_time_parity() {
    let _guard = timing_lock();
    let mut params = BenchParams {
        n: 1 << 18,
        k: 3,
        threads: 2,
        iterations: 10,
        seed: 5489,
        mode: PartitionMode::Single,
        preallocate: true,
    };
    let single = run_benchmark(Algorithm::Registration, &params).unwrap();
    params.mode = PartitionMode::Dual;
    let dual = run_benchmark(Algorithm::Registration, &params).unwrap();
    let diff = (single.build.mean_s - dual.build.mean_s).abs();
    let band = 3.0 * (single.build.sd_s + dual.build.sd_s);
    if diff < band {
        println!(
            "criterion 6: PASS - single/dual build means within 3 combined sd \
             ({:.4} s vs {:.4} s)",
            single.build.mean_s, dual.build.mean_s
        );
    } else {
        println!(
            "criterion 6: WARN - single/dual build means differ by {diff:.4} s, \
             band {band:.4} s (environment-dependent)"
        );
    }
}

#[test]
fn criterion_07_retrieval_counts() {
    let start = Instant::now();
    for p in 10u32..=16 {
        let n = 1usize << p;
        let ds = generate_tuples(GenSpec::with_default_seed(n, 3).unwrap());
        let (arrays, _) = presort_dense_arrays(&ds, 1).unwrap();
        let mut state = init_registration(n).unwrap();
        partition_all(&mut state, &arrays, PartitionMode::Single).unwrap();
        assert_eq!(
            state.retrievals,
            state.passes as u64 * n as u64,
            "retrievals != passes * n at n=2^{p}"
        );
        let bound = ((n + 1) as f64).log2().ceil() as usize + 1;
        assert!(
            state.passes <= bound,
            "n=2^{p}: {} passes exceeds ceil(log2(n+1))+1 = {bound}",
            state.passes
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 60 s");
    println!("criterion 7: PASS - retrievals = passes * n with passes within the log bound ({elapsed:?})");
}

#[test]
fn criterion_08_dimensionality_shape() {
    let _guard = timing_lock();
    let start = Instant::now();
    let base = BenchParams {
        n: 1 << 20,
        k: 2,
        threads: 4,
        iterations: 3,
        seed: 5489,
        mode: PartitionMode::Single,
        preallocate: true,
    };
    let ks = [2usize, 3, 4, 5, 6];
    let mut totals = vec![Vec::new(); 3];
    for &k in &ks {
        let mut params = base;
        params.k = k;
        for (i, alg) in Algorithm::ALL.iter().enumerate() {
            let r = run_benchmark(*alg, &params).unwrap();
            totals[i].push(r.total.mean_s);
        }
    }
    let monotone = |xs: &[f64]| xs.windows(2).all(|w| w[1] >= w[0]);
    let presort_ok = monotone(&totals[1]);
    let registration_ok = monotone(&totals[2]);
    let med_min = totals[0].iter().cloned().fold(f64::INFINITY, f64::min);
    let med_max = totals[0].iter().cloned().fold(0.0, f64::max);
    let medians_ok = (med_max - med_min) / med_min < 0.25;
    let elapsed = start.elapsed();
    if presort_ok && registration_ok && medians_ok {
        println!(
            "criterion 8: PASS - presort/registration grow monotonically over k=2..6, \
             medians varies {:.1}% ({elapsed:?})",
            (med_max / med_min - 1.0) * 100.0
        );
    } else {
        println!(
            "criterion 8: WARN - shape check failed (presort monotone: {presort_ok}, \
             registration monotone: {registration_ok}, medians within 25%: {medians_ok}; \
             medians range {:.1}%) - informational, environment-dependent",
            (med_max / med_min - 1.0) * 100.0
        );
    }
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10 min");
}

#[test]
fn criterion_09_scalability_sanity() {
    let _guard = timing_lock();
    let cores = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1);
    let mut params = BenchParams {
        n: 1 << 20,
        k: 3,
        threads: 1,
        iterations: 3,
        seed: 5489,
        mode: PartitionMode::Single,
        preallocate: true,
    };
    let mut ok = true;
    let mut detail = String::new();
    for alg in [Algorithm::Medians, Algorithm::Presort] {
        params.threads = 1;
        let t1 = run_benchmark(alg, &params).unwrap().build.mean_s;
        params.threads = 4;
        let t4 = run_benchmark(alg, &params).unwrap().build.mean_s;
        let speedup = t1 / t4;
        detail.push_str(&format!("{alg} t1/t4 = {speedup:.2}; "));
        ok &= speedup >= 1.5;
    }
    if cores < 4 {
        println!("criterion 9: WARN - only {cores} cores available, speedup check skipped ({detail})");
    } else if ok {
        println!("criterion 9: PASS - {detail}");
    } else {
        println!("criterion 9: WARN - {detail}- informational, environment-dependent");
    }
}

#[test]
fn criterion_10_benchmark_reproducibility() {
    let spec = GenSpec::new(1 << 14, 4, 424242).unwrap();
    let ds1 = Arc::new(generate_tuples(spec));
    let ds2 = Arc::new(generate_tuples(spec));
    assert_eq!(*ds1, *ds2, "datasets differ between identical runs");
    let first = build_all(&ds1, 4);
    let second = build_all(&ds2, 4);
    for (a, b) in first.iter().zip(&second) {
        assert!(a.same_structure(b), "trees differ between identical runs");
    }
    println!("criterion 10: PASS - identical arguments reproduce datasets and trees exactly");
}
