//! Ideal-related K-theory invariants of graph algebras.
//!
//! Starting from a finite directed multigraph this crate computes the
//! lattice of saturated hereditary vertex sets, the K₀/K₁ groups of every
//! subquotient with vertex and unit classes, the six-term exact sequence of
//! every ideal triple, and compares two such invariants. For amplified
//! graphs the comparison is an exact classification decided through
//! canonical forms of amplified transitive closures.
//!
//! # Graph text format
//!
//! Line oriented, UTF-8. `#` starts a comment.
//!
//! ```text
//! vertices v w x
//! edge v w 2
//! edge w x inf
//! ```
//!
//! Multiplicities are nonnegative decimals or the literal `inf` for
//! countably many parallel edges. Absent pairs have multiplicity 0.

pub mod classify;
pub mod config;
pub mod error;
pub mod graph;
pub mod kweb;
pub mod lattice;
pub mod moves;
pub mod zmod;

pub use config::Config;
pub use error::{Error, Result};
pub use graph::{Graph, Multiplicity, Reachability, VertexSet};
pub use kweb::{
    build_kweb, compare_kwebs, is_positive, k_groups_of_pair, six_term, CompareOptions, KGroups,
    KWeb, KWebMetadata, Positivity, SixTerm, Verdict,
};
pub use lattice::{
    enumerate_lattice, hereditary_closure, is_hereditary, is_saturated,
    saturated_hereditary_closure, saturation, IdealLattice,
};
