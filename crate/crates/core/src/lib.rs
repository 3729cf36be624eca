//! Weighted transposition distances between permutations when the cost of
//! swapping two elements is their distance on a weighted path or Y-tree.
//!
//! Interfaces are 1-indexed. Products compose right to left:
//! `(p * q)(i) = p(q(i))`.

pub mod cycle;
pub mod gen;
pub mod oracle;
pub mod perm;
pub mod solver;
pub mod tree;

pub use cycle::{
    classify_cycle, decompose_cycle, decompose_cycle_with_ops, delta_cycle, BalanceCounts,
    CycleClass, CycleKind, SolveError, Transform,
};
pub use oracle::{
    exact_distance, exact_distance_pair, BudgetLimit, CostTable, DistanceTable, OracleError,
    SearchBudget, SwapCost,
};
pub use perm::{Cycle, PermError, Permutation, Transposition};
pub use solver::{
    decompose, decompose_merged, lower_bound, normalize_sorting, verify_transform, CycleReport,
    DistanceReport, Method, NormalizeError, VerificationReport,
};
pub use tree::{BranchId, Edge, Shape, TreeError, TreeMetric, Weight};
