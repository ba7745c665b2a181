//! Demonstrates that all three builders produce the same balanced tree.
//!
//! Because a super key totally orders distinct tuples, the balanced k-d
//! tree for a dataset is unique — so the median-of-medians, presorted
//! index-array, and registration builders must agree node for node.
//!
//! Run with: cargo run --example compare_builders

use std::sync::Arc;
use std::time::Instant;

use kdbench::datagen::{generate_tuples, GenSpec};
use kdbench::medians::{build_medians, MedianConfig};
use kdbench::presort::build_presort;
use kdbench::registration::{build_registration, PartitionMode};
use kdbench::tree::verify_tree;

fn main() {
    let spec = GenSpec::with_default_seed(50_000, 3).unwrap();
    let ds = Arc::new(generate_tuples(spec));
    println!("dataset: n = {}, k = {}", ds.len(), ds.k());

    let t = Instant::now();
    let medians = build_medians(ds.clone(), 1, &MedianConfig::default()).unwrap();
    println!("medians builder:      {:?}", t.elapsed());

    let t = Instant::now();
    let presort = build_presort(ds.clone(), 1).unwrap();
    println!("presort builder:      {:?}", t.elapsed());

    let t = Instant::now();
    let registration = build_registration(ds.clone(), 1, PartitionMode::Single).unwrap();
    println!("registration builder: {:?}", t.elapsed());

    assert!(medians.same_structure(&presort));
    assert!(medians.same_structure(&registration));
    println!("all three trees are node-for-node identical");

    let report = verify_tree(&medians);
    assert!(report.is_valid());
    println!(
        "verified: {} nodes, height {}",
        report.node_count, report.height
    );
}
