//! DP-coloring thresholds of complete bipartite graphs.
//!
//! `χ_DP(K_{k,t}) = k + 1` exactly when some `k`-fold cover of `K_{k,t}` has
//! no coloring, and that happens exactly when `t` columns can block all `k^k`
//! left assignments. This crate models covers as one permutation per edge,
//! decides colorability by backtracking, computes the threshold `μ(k)` by
//! exact minimum set cover over blocked sets, builds explicit uncolorable
//! covers greedily, and checks everything through re-verifiable certificates.
//!
//! Bound formulas and Monte Carlo estimates are generic over [`Scalar`]
//! (`f32` or `f64`); the aliases below fix `f64`.

pub mod bitset;
pub mod blocking;
pub mod bounds;
pub mod cache;
pub mod certificate;
pub mod construct;
pub mod cover;
pub mod error;
pub mod graph;
pub mod mu;
pub mod perm;
pub mod scalar;
pub mod solver;

pub use bitset::BitSet;
pub use blocking::{blocked_set, is_bad_for, BlockedSet, ColumnClass};
pub use certificate::{Certificate, Claim};
pub use cover::{build_cover, CandidateColoring, MatchingCover};
pub use error::{Error, Result};
pub use graph::{complete_bipartite, cycle, Graph};
pub use mu::{decide_uncoverable, mu_exact, mu_greedy, MuResult, MuValue};
pub use perm::{Assignment, Permutation};
pub use scalar::Scalar;
pub use solver::{chi_dp_exact, find_coloring};

pub type BoundsReport = bounds::BoundsReport<f64>;
pub type BoundsReport32 = bounds::BoundsReport<f32>;
pub type Estimate = bounds::Estimate<f64>;
pub type Estimate32 = bounds::Estimate<f32>;
/// Exact rationals for `k <= 8` probability and expectation values.
pub type Exact = num::BigRational;
