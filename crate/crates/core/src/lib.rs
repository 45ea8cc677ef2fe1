//! Personalized PageRank of discrete and continuous temporal networks.
//!
//! A temporal network is reduced to one accumulated adjacency matrix per
//! instant, normalized to a stochastic matrix and solved for its PageRank
//! vector. Per-node localization bounds and Kendall tau-b comparisons of
//! trajectories are built on top.

// NaN must fail the range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accumulate;
pub mod cli;
pub mod config;
pub mod converge;
pub mod error;
pub mod format;
pub mod ingest;
pub mod localization;
pub mod network;
pub mod output;
pub mod pagerank;
pub mod presets;
pub mod quadrature;
pub mod rank;
pub mod sparse;
pub mod timefn;

pub use accumulate::{accumulate_continuous, accumulate_discrete, row_normalize, truncate, StochasticSnapshot};
pub use error::{Error, Result};
pub use network::{
    ContinuousTemporalNetwork, DampingSchedule, DecayKernel, DiscreteTemporalNetwork, PersonalizationSchedule,
};
pub use pagerank::{
    pagerank_direct, pagerank_power, trajectory_continuous, trajectory_discrete, GoogleOperator,
    PageRankTrajectory, SolverConfig, SolverKind, TrajectoryOptions,
};
pub use rank::kendall_tau;
pub use sparse::CsrMatrix;
pub use timefn::TimeFunction;
