//! Exact tools for (alpha, beta)-community analysis on vertex-transitive
//! "twin group" graphs, together with the low-degree-polynomial gadget
//! builders that make such graphs interesting.
//!
//! A subset `S` of vertices is an (alpha, beta)-community when every member
//! has at least `alpha * |S|` neighbours inside `S` (counting itself) and
//! every non-member has fewer than `beta * |S|` (or none at all). All
//! thresholds are exact rationals; nothing in this crate rounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: prime-field arithmetic, univariate interpolation and
//!   bivariate low-degree extension tables.
//! * [`labelcover`]: projection-style constraint graphs, a 3SAT front end
//!   and exact satisfying-labeling counters.
//! * [`partition`]: random balanced partitions of bi-regular bipartite
//!   graphs with verified block/edge-density certificates.
//! * [`graph`]: the twin-group graph representation (explicit or oracle
//!   adjacency), community verification, enumeration, counting, max-gap.
//! * [`detector`]: the tuple-based community detector and its exhaustive
//!   and sampled drivers.
//! * [`counting`]: the parsimonious gadget mapping satisfying labelings
//!   one-to-one onto communities.
//! * [`decision`]: the gap gadget mapping label-cover value to community
//!   quality, with explicit and oracle builds.
//! * [`gen`]: seeded instance generators (3SAT, planted community,
//!   bi-regular bipartite).
//! * [`manifest`]: reproducibility manifests for CLI runs.
//!
//! Every algorithm that could blow up combinatorially takes a [`budget`]
//! and fails loudly instead of thrashing.

pub mod budget;
pub mod counting;
pub mod decision;
pub mod detector;
pub mod error;
pub mod field;
pub mod gen;
pub mod graph;
pub mod labelcover;
pub mod manifest;
pub mod partition;

pub use error::Error;

/// Exact non-negative rational used for thresholds and fractions.
pub type Frac = num_rational::Ratio<u64>;

/// Exact signed rational used for gaps and differences.
pub type SFrac = num_rational::Ratio<i64>;

/// Convenience constructor for a `Frac`.
pub fn frac(num: u64, den: u64) -> Frac {
    Frac::new(num, den)
}
