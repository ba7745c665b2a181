//! Builds the 15-tuple reference dataset into a balanced k-d tree and
//! prints its structure, showing the super-key split at every depth.
//!
//! Run with: cargo run --example build_fixture

use std::sync::Arc;

use kdbench::fixture::golden_fixture;
use kdbench::medians::{build_medians, MedianConfig};
use kdbench::tree::{verify_tree, KdNode};

fn print_node(node: &Option<Box<KdNode>>, ds: &kdbench::Dataset, depth: usize) {
    let Some(node) = node else { return };
    let t = ds.tuple(node.tuple_index);
    let lead = depth % ds.k();
    println!(
        "{:indent$}depth {depth} (splits on dimension {lead}): {t:?}",
        "",
        indent = depth * 2
    );
    print_node(&node.low, ds, depth + 1);
    print_node(&node.high, ds, depth + 1);
}

fn main() {
    let ds = Arc::new(golden_fixture());
    let tree = build_medians(ds.clone(), 1, &MedianConfig::default()).expect("fixture builds");

    print_node(&tree.root, &ds, 0);

    let report = verify_tree(&tree);
    println!(
        "\n{} nodes, height {}, {} violations",
        report.node_count,
        report.height,
        report.violations.len()
    );
    assert!(report.is_valid());
}
