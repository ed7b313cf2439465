//! Adaptive mirror descent for problems that are relatively continuous or relatively smooth.
//!
//! The crate provides Bregman geometries with closed-form prox steps, a small problem
//! library headed by linear Fisher markets, deterministic and stochastic gradient oracles,
//! the adaptive method together with fixed-step, decaying-step and proportional-response
//! baselines, and the analysis used to check convergence certificates on recorded runs.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{BregmanGeometry, DualVector, GeometryKind, Norm, Point};
pub use oracle::{NoiseKind, Oracle, OracleConfig};
pub use problems::{FisherMarket, KnownOptimum, Objective, Problem};
pub use solvers::{run, InitPolicy, RunOptions, SecondPoint, SolverKind, SolverSpec};
