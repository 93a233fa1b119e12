//! Scalar abstraction for all planner math.
//!
//! Every score, position coordinate, reward, and metric in this crate is
//! generic over [`Scalar`], so the same solvers run in `f32` or `f64`.
//! The crate-root type aliases pin the double-precision configuration used
//! by the CLI and the benchmark harness.

use std::fmt;

use num_traits::Float;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar: Float + fmt::Debug + fmt::Display + Default + Send + Sync + 'static {
    /// Lossy conversion from `f64`, used when ingesting sampled or
    /// configured values into the scalar lane.
    fn from_f64(v: f64) -> Self;

    /// Lossless widening to `f64` for reporting and CSV output.
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }
}
