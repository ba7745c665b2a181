//! Balanced k-d tree construction three ways, with a reproducible
//! benchmark workbench.
//!
//! A k-d tree over n k-dimensional tuples is *balanced* when every node
//! splits its subtree so the low side holds n/2 tuples and the high side
//! (n-1)/2, with splits compared under the *super key* for the node's
//! depth: the cyclic permutation of coordinates starting at dimension
//! depth mod k, ordered lexicographically. Because a super key totally
//! orders distinct tuples, the balanced tree for a given dataset is
//! unique — which is what makes three very different construction
//! strategies directly comparable:
//!
//! - [`medians::build_medians`] — in-place median-of-medians selection at
//!   every node, O(n log n).
//! - [`presort::build_presort`] — k presorted index arrays kept partitioned
//!   at every level by stable scans, O(kn log n), with an optional
//!   dual-threaded partition pass.
//! - [`registration::build_registration`] — partitions are *registered* in
//!   compact bookkeeping arrays instead of moving index elements; the tree
//!   is then built in O(n) from the resulting permutation.
//!
//! [`tree::verify_tree`] checks any result structurally, and [`bench`]
//! times the three builders phase by phase over datasets generated
//! deterministically by [`datagen`] (MT19937-64, fixed seeds). The
//! `kdbench` binary exposes the workbench on the command line; the
//! `examples/` directory shows each capability in isolation.

pub mod bench;
pub mod datagen;
pub mod error;
pub mod fixture;
pub mod medians;
pub mod mt;
pub mod presort;
pub mod registration;
pub mod sort;
pub mod tree;
pub mod tuple;

pub use bench::{run_benchmark, run_sweep, Algorithm, BenchParams, BenchRecord, SweepKind};
pub use error::{KdError, Result};
pub use medians::build_medians;
pub use presort::build_presort;
pub use registration::{build_registration, PartitionMode};
pub use tree::{verify_tree, KdNode, KdTree, VerificationReport};
pub use tuple::{median_split_sizes, super_key_compare, Dataset, SuperKeySpec};
