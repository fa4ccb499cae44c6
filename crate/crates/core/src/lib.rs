//! Vertex sequencing for the Extended-TSP objective.
//!
//! Given an undirected weighted graph and a non-increasing discount `f` with
//! window `k`, find an ordering of the vertices maximizing
//! `sum over edges of f(|d_u - d_v|) * w(u, v)`.
//!
//! Solvers: [`greedy`], [`cycle_cover`], [`local_search`] and the exact
//! [`tree_exact`] dynamic program for trees, all validated against the
//! exhaustive references in [`oracle`].

pub mod cli;
pub mod cycle_cover;
pub mod error;
pub mod gen;
pub mod greedy;
pub mod io;
pub mod local_search;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod solve;
pub mod tree_exact;

pub use error::{Error, Result};
pub use solve::{solve, SolveOptions};
pub use model::{
    merge_directed, realized_edges, score, Algorithm, Discount, DiscountKind, Edge, Graph, Layout,
    SolveReport, Vertex, TOLERANCE,
};
