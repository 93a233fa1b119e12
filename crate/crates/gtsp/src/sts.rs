//! Sparse tree search: a depth-`H` recursion that expands only the
//! top-`k` proposals per end-effector at each node.
//!
//! At every node the candidate set is recomputed from the *voided*
//! residual plan space, each candidate is applied through the void-zone
//! dynamics, and the best accumulated return wins. Expanding with `k`
//! at least the per-tool proposal count makes the search exhaustive and
//! therefore exact; small `k` trades optimality for speed.

use std::collections::HashMap;

use crate::error::{GtspError, Result};
use crate::exact::Solved;
use crate::model::{
    apply_action, global_cmp, step_reward, GraspProposal, Plan, PlanState, RewardParams, ToolId,
};
use crate::scalar::Scalar;

/// Tree-search configuration: horizon, sparsity factor, and rewards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsConfig<T> {
    horizon: usize,
    k: usize,
    params: RewardParams<T>,
}

impl<T: Scalar> StsConfig<T> {
    /// Validates `horizon >= 1` and `k >= 1`.
    pub fn new(horizon: usize, k: usize, params: RewardParams<T>) -> Result<Self> {
        if horizon < 1 {
            return Err(GtspError::invalid("horizon H must be >= 1"));
        }
        if k < 1 {
            return Err(GtspError::invalid("sparsity factor k must be >= 1"));
        }
        Ok(StsConfig { horizon, k, params })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &RewardParams<T> {
        &self.params
    }
}

/// The union of the `k` highest-score proposals of each tool present in
/// `omega` (all of them when a tool has fewer), in the global
/// deterministic order.
pub fn top_k_per_tool<T: Scalar>(omega: &[GraspProposal<T>], k: usize) -> Vec<GraspProposal<T>> {
    let mut sorted: Vec<GraspProposal<T>> = omega.to_vec();
    sorted.sort_by(global_cmp);
    let mut taken: HashMap<ToolId, usize> = HashMap::new();
    sorted.retain(|w| {
        let count = taken.entry(w.tool).or_insert(0);
        *count += 1;
        *count <= k
    });
    sorted
}

/// Runs the sparse tree search and unrolls the chosen branch into a plan.
///
/// When the plan space exhausts before depth `H` the partial plan found
/// so far is returned (its value accumulates only realized steps), so a
/// receding-horizon driver always gets a usable action while any
/// proposal exists. Callers comparing against the exact solver should
/// restrict to full-length results (`plan.len() == cfg.horizon()`).
pub fn sts<T: Scalar>(s: &PlanState<T>, cfg: &StsConfig<T>) -> Solved<T> {
    let mut nodes = 0;
    let (steps, value) = search(s, cfg.horizon(), cfg, &mut nodes);
    Solved {
        plan: Plan { steps, value },
        nodes_expanded: nodes,
    }
}

fn search<T: Scalar>(
    s: &PlanState<T>,
    depth_left: usize,
    cfg: &StsConfig<T>,
    nodes: &mut u64,
) -> (Vec<GraspProposal<T>>, T) {
    *nodes += 1;
    if depth_left == 0 {
        return (Vec::new(), T::zero());
    }
    let candidates = top_k_per_tool(&s.omega, cfg.k());

    let mut best: Option<(T, GraspProposal<T>, Vec<GraspProposal<T>>)> = None;
    for w in candidates {
        let next =
            apply_action(s, &w, cfg.params().l()).expect("candidate drawn from the plan space");
        let (tail, tail_value) = search(&next, depth_left - 1, cfg, nodes);
        let value = step_reward(s.tool, &w, cfg.params().c()) + tail_value;
        // Strict improvement only: among equal values the candidate
        // earliest in the global order wins, so output is deterministic.
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, w, tail));
        }
    }

    match best {
        Some((value, w, tail)) => {
            let mut steps = Vec::with_capacity(tail.len() + 1);
            steps.push(w);
            steps.extend(tail);
            (steps, value)
        }
        None => (Vec::new(), T::zero()),
    }
}
