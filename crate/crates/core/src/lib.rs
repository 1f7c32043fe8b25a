//! Minimization of monotone Boolean formulas under the secret-sharing cost
//! metric used by circuit-based key-policy ABE.
//!
//! The cost of an access structure is the number of root-to-leaf paths of its
//! circuit, which equals the number of literals of the unfolded formula. Each
//! path is one secret share at key generation and one pairing at decryption.
//! This crate searches for cheaper equivalent formulas with rewrite-based
//! local search:
//!
//! - [`formula`]: normalized n-ary AND/OR trees, parsing, printing, cost,
//!   evaluation, and a brute-force truth-table equivalence oracle.
//! - [`circuit`]: monotone DAGs, path counting and unfolding.
//! - [`rewrite`]: factorization (with embedded absorption) and
//!   defactorization sites.
//! - [`heuristics`]: hill climbing, simulated annealing, the custom
//!   decaying-defactorization heuristic, and their iterated variants.
//! - [`datagen`]: seeded dataset generators and the `trim` hygiene pass.
//! - [`abe_cost`]: share counts and the per-share time model.
//!
//! The crate is `no_std` and only needs `alloc`. Clocks, files and the CLI
//! live in the `boolmin` companion crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod abe_cost;
pub mod circuit;
pub mod datagen;
pub mod formula;
pub mod heuristics;
pub mod rewrite;
mod seed;

pub use abe_cost::{share_count, CostModel, KeygenBasis, PipelineRecord, ShareCount};
pub use circuit::{Circuit, CircuitError, CircuitIssue, CircuitNode, PathCount};
pub use datagen::{GenError, GenSpec};
pub use formula::oracle::{check_equivalence, equivalent, EquivalenceMode, OracleError, Verdict};
pub use formula::{Attribute, AttributeUniverse, Formula, Gate, Node, NodeKind, NodePath, ParseError};
pub use heuristics::{AcceptanceForm, Algorithm, Budget, HeuristicParams, Interrupted};
pub use rewrite::{RewriteError, RewriteKind, RewriteSite};
pub use seed::derive_seed;
