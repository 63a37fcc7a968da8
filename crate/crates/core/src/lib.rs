//! Influence maximization with three objectives: expected influence spread,
//! seed cost and propagation time, solved by an evolutionary algorithm with
//! variable-length seed sets and embedding-aligned crossover.
//!
//! Module map:
//!
//! - [`graph`]: networks with propagation probabilities and activation costs
//! - [`diffusion`]: latency-aware independent cascade simulation and an exact
//!   small-graph oracle
//! - [`objectives`]: the (spread, cost, time) objective vector and dominance
//! - [`embedding`]: random-walk + skip-gram node embeddings
//! - [`operators`]: aligned crossover, variable-length mutation and baseline
//!   fixed-length operators
//! - [`evolution`]: NSGA-II machinery and the main loop for all four variants
//! - [`metrics`]: Pareto fronts, normalization, 3-D hypervolume, Wilcoxon test
//! - [`experiment`]: the repetition grid, reports and replay manifests

// Rate and probability guards are written as `!(x < p)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffusion;
pub mod embedding;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod objectives;
pub mod operators;
pub mod rng;
mod seeds;

pub use error::{Error, Result};
pub use graph::{CostModel, Graph, NodeId, ProbabilityModel};
pub use objectives::{dominates, EvalConfig, EvalMode, ObjectiveVector};
pub use seeds::SeedSet;
