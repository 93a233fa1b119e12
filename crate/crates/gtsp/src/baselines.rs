//! Heuristic one-step selectors used as comparison baselines.
//!
//! Each selector maps a planning state to a single next grasp:
//!
//! * [`randomized_select`] — swaps tools with a fixed probability
//!   (forced after too many picks on one tool) and grasps the target
//!   tool's best proposal;
//! * [`naive_greedy_select`] — argmax of the one-step reward;
//! * [`greedy_tool_select`] — picks the tool whose top-`n` scores sum
//!   highest, then grasps that tool's best proposal.
//!
//! Within its chosen tool, every selector grasps the highest-score
//! proposal under the global deterministic ordering — the strongest
//! deterministic choice, so the baselines are not strawmen.

use rand::Rng;

use crate::error::{GtspError, Result};
use crate::model::{global_cmp, step_reward, GraspProposal, PlanState, ToolId};
use crate::scalar::Scalar;

/// Default swap probability for the randomized selector.
pub const DEFAULT_P_SWAP: f64 = 0.75;
/// Default number of picks after which a tool change is forced.
pub const DEFAULT_MAX_HOLD: u32 = 10;
/// Default number of top scores summed per tool by the greedy selector.
pub const DEFAULT_N_TOP: usize = 5;

/// Highest-score proposal of `tool`, under the global ordering.
fn best_of_tool<T: Scalar>(s: &PlanState<T>, tool: ToolId) -> Option<GraspProposal<T>> {
    s.omega
        .iter()
        .filter(|w| w.tool == tool)
        .min_by(|a, b| global_cmp(a, b))
        .copied()
}

/// Randomized selector: with probability `p_swap` (or forcibly once
/// `steps_since_swap` reaches `max_hold` and another tool has
/// proposals) targets a uniformly random *other* tool, else keeps the
/// current one; returns the target tool's best proposal.
pub fn randomized_select<T: Scalar, R: Rng>(
    s: &PlanState<T>,
    p_swap: f64,
    max_hold: u32,
    steps_since_swap: u32,
    rng: &mut R,
) -> Result<GraspProposal<T>> {
    if s.omega.is_empty() {
        return Err(GtspError::EmptyPlanSpace);
    }
    let tools = s.tools_present();
    let others: Vec<ToolId> = tools.iter().copied().filter(|&t| t != s.tool).collect();

    let target = if others.is_empty() {
        s.tool
    } else if best_of_tool(s, s.tool).is_none() {
        // The mounted tool has nothing left; a swap is the only option.
        others[rng.random_range(0..others.len())]
    } else if steps_since_swap >= max_hold || rng.random_bool(p_swap) {
        others[rng.random_range(0..others.len())]
    } else {
        s.tool
    };

    Ok(best_of_tool(s, target).expect("target tool has proposals"))
}

/// Greedy argmax of the one-step reward, ties broken by the global
/// ordering. Invariant to the listing order of the plan space.
pub fn naive_greedy_select<T: Scalar>(s: &PlanState<T>, c: T) -> Result<GraspProposal<T>> {
    s.omega
        .iter()
        .max_by(|a, b| {
            step_reward(s.tool, a, c)
                .partial_cmp(&step_reward(s.tool, b, c))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| global_cmp(b, a))
        })
        .copied()
        .ok_or(GtspError::EmptyPlanSpace)
}

/// Accumulates each tool's `n_top` best scores and selects the tool
/// with the highest sum (ties to the lower tool id), returning that
/// tool's best proposal.
pub fn greedy_tool_select<T: Scalar>(s: &PlanState<T>, n_top: usize) -> Result<GraspProposal<T>> {
    if s.omega.is_empty() {
        return Err(GtspError::EmptyPlanSpace);
    }
    let mut best: Option<(ToolId, T)> = None;
    for tool in s.tools_present() {
        let mut scores: Vec<T> = s
            .omega
            .iter()
            .filter(|w| w.tool == tool)
            .map(|w| w.rho)
            .collect();
        scores.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let sum = scores
            .iter()
            .take(n_top)
            .fold(T::zero(), |acc, &rho| acc + rho);
        // tools_present is ascending, so strict improvement keeps the
        // lowest tool id on ties.
        if best.is_none_or(|(_, s)| sum > s) {
            best = Some((tool, sum));
        }
    }
    let (tool, _) = best.expect("nonempty plan space has at least one tool");
    Ok(best_of_tool(s, tool).expect("chosen tool has proposals"))
}
