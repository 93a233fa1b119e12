//! Evaluation metrics for tool-selection runs.
//!
//! Raw throughput rewards strategies that fail fast, so the headline
//! metric here combines the pick success rate `PSR = PS / PA` with the
//! tool consistency rate `TCR = 1 - TC / PA` into an F-beta-style score:
//!
//! ```text
//! score(beta) = (1 + beta^2) * PSR * TCR / (beta^2 * PSR + TCR)
//! ```
//!
//! `beta` should be set to the opportunity cost of one tool change —
//! roughly, how many successful picks fit in the time a swap takes.
//! The benchmark harness defaults to `beta = 0.33`.

use crate::error::{GtspError, Result};
use crate::scalar::Scalar;

/// Default `beta` used by the benchmark harness.
pub const DEFAULT_BETA: f64 = 0.33;

/// Event tallies from an episode: tool changes, pick attempts, and pick
/// successes. At most one tool change happens per pick attempt, so
/// `tc <= pa`, and `ps <= pa` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EventCounts {
    pub tc: u64,
    pub pa: u64,
    pub ps: u64,
}

impl EventCounts {
    pub fn add(&mut self, other: &EventCounts) {
        self.tc += other.tc;
        self.pa += other.pa;
        self.ps += other.ps;
    }
}

/// Tallies a symbol sequence where `T` is a tool change, `F` a failed
/// pick, and `S` a successful pick. Any other symbol is rejected.
pub fn parse_event_log(log: &str) -> Result<EventCounts> {
    let mut counts = EventCounts::default();
    for symbol in log.chars() {
        match symbol {
            'T' => counts.tc += 1,
            'F' => counts.pa += 1,
            'S' => {
                counts.pa += 1;
                counts.ps += 1;
            }
            other => return Err(GtspError::MalformedLog(other)),
        }
    }
    Ok(counts)
}

/// Pick success rate and tool consistency rate.
pub fn psr_tcr<T: Scalar>(counts: &EventCounts) -> Result<(T, T)> {
    if counts.pa == 0 {
        return Err(GtspError::NoAttempts);
    }
    let pa = T::from_f64(counts.pa as f64);
    let psr = T::from_f64(counts.ps as f64) / pa;
    let tcr = T::one() - T::from_f64(counts.tc as f64) / pa;
    Ok((psr, tcr))
}

/// The combined F-beta-style score of PSR and TCR.
///
/// `beta = 0` returns PSR exactly; `PSR = TCR = 0` scores 0 (the 0/0
/// case deserves the minimum).
pub fn beta_tc_score<T: Scalar>(counts: &EventCounts, beta: T) -> Result<T> {
    if beta < T::zero() {
        return Err(GtspError::invalid(format!("beta must be >= 0, got {beta}")));
    }
    let (psr, tcr) = psr_tcr::<T>(counts)?;
    if beta == T::zero() {
        return Ok(psr);
    }
    if psr == T::zero() && tcr == T::zero() {
        return Ok(T::zero());
    }
    let b2 = beta * beta;
    Ok((T::one() + b2) * psr * tcr / (b2 * psr + tcr))
}

/// Successful picks per hour under the model timing: each attempt takes
/// `pick_time` seconds and each tool change `tc_time` seconds.
pub fn throughput<T: Scalar>(counts: &EventCounts, pick_time: T, tc_time: T) -> Result<T> {
    if counts.pa == 0 {
        return Err(GtspError::NoAttempts);
    }
    let elapsed =
        T::from_f64(counts.pa as f64) * pick_time + T::from_f64(counts.tc as f64) * tc_time;
    Ok(T::from_f64(3600.0) * T::from_f64(counts.ps as f64) / elapsed)
}

/// Optimization-quality advantage of the exact solver over the tree
/// search on the same instance and horizon.
pub fn advantage<T: Scalar>(v_exact: T, v_sts: T) -> T {
    v_exact - v_sts
}
