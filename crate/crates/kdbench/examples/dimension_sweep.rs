//! Sweeps tuple dimensionality k and emits plot-ready columns.
//!
//! The presort and registration builders sort and maintain one index
//! array per dimension, so their cost grows with k; the median-of-medians
//! builder touches only one super key per comparison and is nearly flat.
//!
//! Run with: cargo run --release --example dimension_sweep

use kdbench::bench::{run_sweep, write_plot_data, Algorithm, BenchParams, SweepKind};
use kdbench::registration::PartitionMode;

fn main() {
    let base = BenchParams {
        n: 1 << 16,
        k: 2,
        threads: 1,
        iterations: 3,
        seed: 5489,
        mode: PartitionMode::Single,
        preallocate: true,
    };
    let records = run_sweep(&Algorithm::ALL, &base, SweepKind::K, &[2, 3, 4, 5]).unwrap();

    // x then one total-time column per algorithm; feed straight to gnuplot
    let mut out = Vec::new();
    write_plot_data(&mut out, &records, SweepKind::K).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
}
