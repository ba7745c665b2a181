//! Tree nodes and structural verification.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::tuple::{super_key_compare_unchecked, Dataset, SuperKeySpec};

/// One tree node. `low` holds the subtree whose super keys compare Less
/// than this node's under the spec of this node's depth; `high` holds the
/// Greater side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KdNode {
    pub tuple_index: usize,
    pub low: Option<Box<KdNode>>,
    pub high: Option<Box<KdNode>>,
}

impl KdNode {
    pub fn leaf(tuple_index: usize) -> Box<KdNode> {
        Box::new(KdNode {
            tuple_index,
            low: None,
            high: None,
        })
    }
}

/// A balanced k-d tree over a shared dataset.
#[derive(Debug, Clone)]
pub struct KdTree {
    pub root: Option<Box<KdNode>>,
    pub n: usize,
    pub k: usize,
    pub dataset: Arc<Dataset>,
}

impl KdTree {
    /// Node-for-node structural equality (tuple indices and shape).
    /// Timings and dataset identity are irrelevant; two trees built from
    /// equal datasets compare equal iff every node matches.
    pub fn same_structure(&self, other: &KdTree) -> bool {
        self.n == other.n && self.k == other.k && self.root == other.root
    }
}

/// One ordering violation found by [`verify_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Dataset address of the offending ancestor node.
    pub node: usize,
    /// Dataset address of the descendant that compares on the wrong side.
    pub descendant: usize,
    /// Depth of the ancestor node.
    pub depth: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub node_count: usize,
    pub height: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for every node at depth d, that every tuple in its low subtree
/// compares Less and every tuple in its high subtree compares Greater under
/// the super key with lead d mod k, and that no dataset address appears
/// twice. Violations are reported, never thrown.
pub fn verify_tree(tree: &KdTree) -> VerificationReport {
    let mut report = VerificationReport {
        node_count: 0,
        height: 0,
        violations: Vec::new(),
    };
    let mut seen = vec![false; tree.dataset.len()];
    if let Some(root) = &tree.root {
        report.height = verify_node(root, &tree.dataset, 0, &mut seen, &mut report);
    }
    report
}

fn verify_node(
    node: &KdNode,
    ds: &Dataset,
    depth: usize,
    seen: &mut [bool],
    report: &mut VerificationReport,
) -> usize {
    report.node_count += 1;
    if seen[node.tuple_index] {
        report.violations.push(Violation {
            node: node.tuple_index,
            descendant: node.tuple_index,
            depth,
            message: format!("tuple address {} appears twice", node.tuple_index),
        });
    }
    seen[node.tuple_index] = true;

    let spec = SuperKeySpec::for_depth(depth, ds.k());
    if let Some(low) = &node.low {
        check_side(node.tuple_index, low, ds, spec, depth, Ordering::Less, report);
    }
    if let Some(high) = &node.high {
        check_side(node.tuple_index, high, ds, spec, depth, Ordering::Greater, report);
    }

    let lo_h = node
        .low
        .as_ref()
        .map_or(0, |c| verify_node(c, ds, depth + 1, seen, report));
    let hi_h = node
        .high
        .as_ref()
        .map_or(0, |c| verify_node(c, ds, depth + 1, seen, report));
    1 + lo_h.max(hi_h)
}

fn check_side(
    ancestor: usize,
    subtree: &KdNode,
    ds: &Dataset,
    spec: SuperKeySpec,
    depth: usize,
    expected: Ordering,
    report: &mut VerificationReport,
) {
    let got = super_key_compare_unchecked(ds.tuple(subtree.tuple_index), ds.tuple(ancestor), spec);
    if got != expected {
        report.violations.push(Violation {
            node: ancestor,
            descendant: subtree.tuple_index,
            depth,
            message: format!(
                "tuple {} compares {:?} to ancestor {} at depth {depth}, expected {:?}",
                subtree.tuple_index, got, ancestor, expected
            ),
        });
    }
    if let Some(low) = &subtree.low {
        check_side(ancestor, low, ds, spec, depth, expected, report);
    }
    if let Some(high) = &subtree.high {
        check_side(ancestor, high, ds, spec, depth, expected, report);
    }
}
