//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by planners, policies, generators, and metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GtspError {
    /// A grasp was applied that is not part of the current plan space.
    #[error("action (proposal id {0}) is not in the current plan space")]
    ActionNotInPlanSpace(u32),

    /// No pairwise-separated sequence of the requested length exists.
    #[error("no feasible plan of length {horizon} exists")]
    Infeasible { horizon: usize },

    /// Guard against combinatorial blowup in the exhaustive oracle.
    #[error("instance too large for exhaustive enumeration: {proposals} proposals, horizon {horizon} (limits: 14 proposals, horizon 5)")]
    InstanceTooLarge { proposals: usize, horizon: usize },

    /// A policy was asked to select from an empty plan space.
    #[error("plan space is empty")]
    EmptyPlanSpace,

    /// Rate metrics are undefined when no pick was attempted.
    #[error("no pick attempts recorded")]
    NoAttempts,

    /// An episode log contained a symbol other than T, F, or S.
    #[error("malformed event log: unexpected symbol {0:?}")]
    MalformedLog(char),

    /// Percentiles of an empty sample are undefined.
    #[error("empty input")]
    EmptyInput,

    /// A configuration value violated its contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GtspError>;

impl GtspError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GtspError::InvalidParameter(msg.into())
    }
}
