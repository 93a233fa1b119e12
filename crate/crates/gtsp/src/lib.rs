//! Planning toolkit for the grasp tool selection problem.
//!
//! Bin-picking cells with swappable end-effectors must decide not only
//! *where* to grasp but *which tool* to grasp with, and in what order —
//! tool changes cost cycle time, and every executed grasp disturbs its
//! surroundings. This crate models that decision problem over per-tool
//! grasp proposal sets with deterministic void-zone dynamics and ships:
//!
//! * the shared domain model: proposals, states, rewards, separation,
//!   void transitions, and plan validation ([`model`]);
//! * an exact solver over the elementary-path encoding plus an
//!   exhaustive reference oracle ([`exact`]);
//! * a sparse tree search that expands only the top-`k` proposals per
//!   tool at each node ([`sts`]);
//! * heuristic baseline selectors ([`baselines`]);
//! * a synthetic instance generator built from random Gaussian score
//!   maps ([`synth`]);
//! * a stochastic bin simulator with a receding-horizon driver ([`sim`]);
//! * evaluation metrics: pick-success rate, tool-consistency rate, the
//!   combined score, throughput, and solver advantage ([`metrics`]);
//! * a seeded benchmark harness with CSV output ([`mod@bench`]).
//!
//! All numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below pin the double-precision configuration used by the
//! CLI and the benchmark harness.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod exact;
pub mod instance;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod sts;
pub mod synth;

pub use error::{GtspError, Result};
pub use scalar::Scalar;

/// Double-precision aliases for the core types.
pub type Proposal64 = model::GraspProposal<f64>;
pub type PlanState64 = model::PlanState<f64>;
pub type Plan64 = model::Plan<f64>;
pub type RewardParams64 = model::RewardParams<f64>;
pub type Instance64 = instance::ProblemInstance<f64>;
pub type ScoreGrid64 = synth::ScoreGrid<f64>;
pub type BinWorld64 = sim::BinWorld<f64>;

/// Single-precision aliases.
pub type Proposal32 = model::GraspProposal<f32>;
pub type PlanState32 = model::PlanState<f32>;
pub type Plan32 = model::Plan<f32>;
pub type RewardParams32 = model::RewardParams<f32>;
pub type Instance32 = instance::ProblemInstance<f32>;
