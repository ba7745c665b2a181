//! Deterministic median selection on the reference dataset: partitions
//! the 15 tuples in place about their median under each of the three
//! super keys and cross-checks the result against a full sort.
//!
//! Run with: cargo run --example median_selection

use kdbench::fixture::golden_fixture;
use kdbench::medians::{select_median_and_partition, MedianConfig};
use kdbench::tuple::{median_split_sizes, super_key_compare, SuperKeySpec};

fn main() {
    let ds = golden_fixture();
    let cfg = MedianConfig::default();
    let (lo_size, hi_size) = median_split_sizes(ds.len()).unwrap();

    for lead in 0..ds.k() {
        let spec = SuperKeySpec::new(lead, ds.k()).unwrap();
        let mut ids: Vec<usize> = (0..ds.len()).collect();
        let median = select_median_and_partition(&mut ids, &ds, spec, &cfg).unwrap();
        println!(
            "lead dimension {lead}: median {:?} splits {lo_size} low / {hi_size} high",
            ds.tuple(median)
        );

        // oracle: sorting must put the same tuple at the same rank
        let mut sorted: Vec<usize> = (0..ds.len()).collect();
        sorted.sort_by(|&a, &b| super_key_compare(ds.tuple(a), ds.tuple(b), spec).unwrap());
        assert_eq!(ds.tuple(sorted[lo_size]), ds.tuple(median));

        for &lo in &ids[..lo_size] {
            assert!(super_key_compare(ds.tuple(lo), ds.tuple(median), spec)
                .unwrap()
                .is_lt());
        }
        for &hi in &ids[lo_size + 1..] {
            assert!(super_key_compare(ds.tuple(hi), ds.tuple(median), spec)
                .unwrap()
                .is_gt());
        }
    }
    println!("selection agrees with the full-sort oracle under every lead dimension");
}
