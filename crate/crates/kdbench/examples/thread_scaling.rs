//! Sweeps the builder thread budget and reports speedup per algorithm.
//!
//! The scalability column is t1/tn: total mean time at the smallest
//! swept thread count divided by total mean time at n threads. The trees
//! themselves are identical for every budget — threading only changes
//! how the work is divided.
//!
//! Run with: cargo run --release --example thread_scaling

use kdbench::bench::{run_sweep, write_csv, Algorithm, BenchParams, SweepKind};
use kdbench::registration::PartitionMode;

fn main() {
    let base = BenchParams {
        n: 1 << 18,
        k: 3,
        threads: 1,
        iterations: 3,
        seed: 5489,
        mode: PartitionMode::Single,
        preallocate: false,
    };
    let records = run_sweep(&Algorithm::ALL, &base, SweepKind::Threads, &[1, 2, 4]).unwrap();

    let mut out = Vec::new();
    write_csv(&mut out, &records).unwrap();
    print!("{}", String::from_utf8(out).unwrap());

    println!();
    for r in &records {
        println!(
            "{:>13} @ {} threads: total {:.4} s, speedup {:.2}x",
            r.algorithm.to_string(),
            r.threads,
            r.total.mean_s,
            r.scalability
        );
    }
}
