//! Optimal solver: maximum-return elementary path of exactly `H`
//! pairwise-separated grasps.
//!
//! The problem is encoded as a directed path graph with auxiliary source
//! and sink nodes ([`PathGraph`]). Edge rewards telescope so that the sum
//! along `source -> w_1 -> ... -> w_H -> sink` equals the plan's return.
//! The optimum is found by depth-first branch-and-bound with an admissible
//! bound: the accumulated value plus the sum of the largest remaining
//! scores (swap costs are negative, so dropping them never underestimates).
//! Exactness is checked against [`brute_force_oracle`] in the tests.

use crate::error::{GtspError, Result};
use crate::model::{
    global_cmp, l_separated, plan_lex_cmp, plan_value, step_reward, GraspProposal, Plan, PlanState,
    RewardParams, ToolId,
};
use crate::scalar::Scalar;

/// Slack used when pruning against the incumbent, so equal-value optima
/// survive and the deterministic tie-break sees all of them.
const BOUND_SLACK: f64 = 1e-12;

/// Upper bounds for the exhaustive oracle.
const ORACLE_MAX_PROPOSALS: usize = 14;
const ORACLE_MAX_HORIZON: usize = 5;

/// Node of the path graph: the auxiliary source, a grasp proposal
/// (indexed into the originating plan space), or the auxiliary sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathNode {
    Source,
    Interior(usize),
    Sink,
}

/// Directed graph over the plan space whose elementary source-to-sink
/// paths of `horizon` interior nodes are exactly the feasible plans.
///
/// Admitted edges and rewards:
/// * `source -> i` with reward `c` if tool `i` differs from the mounted
///   tool, else `0`;
/// * `i -> j` for separated pairs, with reward `rho_i` plus `c` on a
///   tool change;
/// * `i -> sink` with reward `rho_i`.
///
/// There is no `source -> sink` edge, no edge into the source, and no
/// edge out of the sink.
#[derive(Debug, Clone)]
pub struct PathGraph<T> {
    proposals: Vec<GraspProposal<T>>,
    source_tool: ToolId,
    c: T,
    horizon: usize,
    separated: Vec<bool>,
}

pub fn build_path_graph<T: Scalar>(
    s: &PlanState<T>,
    params: &RewardParams<T>,
    horizon: usize,
) -> PathGraph<T> {
    let n = s.omega.len();
    let mut separated = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            separated[i * n + j] = l_separated(&s.omega[i], &s.omega[j], params.l());
        }
    }
    PathGraph {
        proposals: s.omega.clone(),
        source_tool: s.tool,
        c: params.c(),
        horizon,
        separated,
    }
}

impl<T: Scalar> PathGraph<T> {
    pub fn interior_len(&self) -> usize {
        self.proposals.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn proposals(&self) -> &[GraspProposal<T>] {
        &self.proposals
    }

    /// Whether interior nodes `i` and `j` are separated (the diagonal
    /// is always false).
    pub fn is_separated(&self, i: usize, j: usize) -> bool {
        self.separated[i * self.interior_len() + j]
    }

    /// Reward of a directed edge, or `None` if the edge is not admitted.
    pub fn edge_reward(&self, from: PathNode, to: PathNode) -> Option<T> {
        let swap = |a: ToolId, b: ToolId| if a != b { self.c } else { T::zero() };
        match (from, to) {
            (PathNode::Source, PathNode::Interior(i)) => {
                Some(swap(self.source_tool, self.proposals[i].tool))
            }
            (PathNode::Interior(i), PathNode::Interior(j)) => {
                if i != j && self.is_separated(i, j) {
                    Some(
                        self.proposals[i].rho
                            + swap(self.proposals[i].tool, self.proposals[j].tool),
                    )
                } else {
                    None
                }
            }
            (PathNode::Interior(i), PathNode::Sink) => Some(self.proposals[i].rho),
            _ => None,
        }
    }

    pub fn source_edge_count(&self) -> usize {
        self.interior_len()
    }

    pub fn sink_edge_count(&self) -> usize {
        self.interior_len()
    }

    pub fn interior_edge_count(&self) -> usize {
        self.separated.iter().filter(|&&sep| sep).count()
    }

    /// Sum of edge rewards along `source -> path -> sink`, or `None` if
    /// any required edge is missing.
    pub fn path_reward(&self, path: &[usize]) -> Option<T> {
        let first = *path.first()?;
        let mut total = self.edge_reward(PathNode::Source, PathNode::Interior(first))?;
        for pair in path.windows(2) {
            total = total
                + self.edge_reward(PathNode::Interior(pair[0]), PathNode::Interior(pair[1]))?;
        }
        let last = *path.last()?;
        total = total + self.edge_reward(PathNode::Interior(last), PathNode::Sink)?;
        Some(total)
    }
}

/// A plan together with search statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved<T> {
    pub plan: Plan<T>,
    /// Search tree nodes visited while producing the plan.
    pub nodes_expanded: u64,
}

struct BranchAndBound<'a, T> {
    graph: &'a PathGraph<T>,
    /// Interior indices in the global deterministic order (descending
    /// score), used both for child expansion and for the bound.
    order: Vec<usize>,
    alive: Vec<bool>,
    path: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
    nodes: u64,
}

impl<'a, T: Scalar> BranchAndBound<'a, T> {
    fn new(graph: &'a PathGraph<T>) -> Self {
        let mut order: Vec<usize> = (0..graph.interior_len()).collect();
        order.sort_by(|&a, &b| global_cmp(&graph.proposals[a], &graph.proposals[b]));
        BranchAndBound {
            graph,
            order,
            alive: vec![true; graph.interior_len()],
            path: Vec::with_capacity(graph.horizon()),
            best: None,
            nodes: 0,
        }
    }

    /// Admissible bound on the best completion: the accumulated value
    /// plus the `remaining` largest scores still alive. Returns `None`
    /// when fewer than `remaining` proposals survive.
    fn completion_bound(&self, acc: T, remaining: usize) -> Option<T> {
        if remaining == 0 {
            return Some(acc);
        }
        let mut bound = acc;
        let mut taken = 0;
        for &i in &self.order {
            if self.alive[i] {
                bound = bound + self.graph.proposals[i].rho;
                taken += 1;
                if taken == remaining {
                    return Some(bound);
                }
            }
        }
        None
    }

    fn offer(&mut self, value: T, path: &[usize]) {
        let better = match &self.best {
            None => true,
            Some((best_value, best_path)) => {
                if value > *best_value {
                    true
                } else if value == *best_value {
                    let candidate: Vec<_> = path.iter().map(|&i| self.graph.proposals[i]).collect();
                    let incumbent: Vec<_> =
                        best_path.iter().map(|&i| self.graph.proposals[i]).collect();
                    plan_lex_cmp(&candidate, &incumbent) == std::cmp::Ordering::Less
                } else {
                    false
                }
            }
        };
        if better {
            self.best = Some((value, path.to_vec()));
        }
    }

    fn search(&mut self, depth: usize, tool: ToolId, acc: T) {
        self.nodes += 1;
        let horizon = self.graph.horizon();
        if depth == horizon {
            let path = std::mem::take(&mut self.path);
            self.offer(acc, &path);
            self.path = path;
            return;
        }
        let Some(bound) = self.completion_bound(acc, horizon - depth) else {
            return; // fewer proposals alive than steps left
        };
        if let Some((best_value, _)) = &self.best {
            if bound < *best_value - T::from(BOUND_SLACK).unwrap() {
                return;
            }
        }
        for idx in 0..self.order.len() {
            let i = self.order[idx];
            if !self.alive[i] {
                continue;
            }
            // Void everything within l of the chosen proposal, i itself
            // included (the separation diagonal is false).
            let mut removed = Vec::new();
            for j in 0..self.graph.interior_len() {
                if self.alive[j] && !self.graph.is_separated(i, j) {
                    self.alive[j] = false;
                    removed.push(j);
                }
            }
            self.path.push(i);
            let reward = step_reward(tool, &self.graph.proposals[i], self.graph.c);
            self.search(depth + 1, self.graph.proposals[i].tool, acc + reward);
            self.path.pop();
            for j in removed {
                self.alive[j] = true;
            }
        }
    }
}

/// Finds the maximum-return sequence of exactly `horizon` pairwise
/// separated grasps, or [`GtspError::Infeasible`] when none exists.
///
/// Ties among equal-value optima are broken lexicographically under the
/// global step ordering, so output is deterministic.
pub fn solve_exact<T: Scalar>(
    s: &PlanState<T>,
    horizon: usize,
    params: &RewardParams<T>,
) -> Result<Solved<T>> {
    if horizon < 1 {
        return Err(GtspError::invalid("horizon H must be >= 1"));
    }
    let graph = build_path_graph(s, params, horizon);
    let mut search = BranchAndBound::new(&graph);
    search.search(0, s.tool, T::zero());
    let nodes_expanded = search.nodes;
    match search.best {
        Some((value, path)) => {
            let steps: Vec<_> = path.iter().map(|&i| graph.proposals[i]).collect();
            Ok(Solved {
                plan: Plan { steps, value },
                nodes_expanded,
            })
        }
        None => Err(GtspError::Infeasible { horizon }),
    }
}

/// Exhaustive reference solver: enumerates every ordered sequence of
/// `horizon` distinct pairwise-separated proposals and returns the best
/// one, with the same deterministic tie-break as [`solve_exact`].
///
/// Guarded against combinatorial blowup; intended for tests and small
/// instances only. Independent of the branch-and-bound path: no graph,
/// no bound, values recomputed from scratch at every leaf.
pub fn brute_force_oracle<T: Scalar>(
    s: &PlanState<T>,
    horizon: usize,
    params: &RewardParams<T>,
) -> Result<Plan<T>> {
    if s.omega.len() > ORACLE_MAX_PROPOSALS || horizon > ORACLE_MAX_HORIZON {
        return Err(GtspError::InstanceTooLarge {
            proposals: s.omega.len(),
            horizon,
        });
    }
    if horizon < 1 {
        return Err(GtspError::invalid("horizon H must be >= 1"));
    }

    let mut best: Option<Plan<T>> = None;
    let mut chosen: Vec<GraspProposal<T>> = Vec::with_capacity(horizon);
    enumerate(s, horizon, params, &mut chosen, &mut best);
    best.ok_or(GtspError::Infeasible { horizon })
}

fn enumerate<T: Scalar>(
    s: &PlanState<T>,
    horizon: usize,
    params: &RewardParams<T>,
    chosen: &mut Vec<GraspProposal<T>>,
    best: &mut Option<Plan<T>>,
) {
    if chosen.len() == horizon {
        let value = plan_value(s.tool, chosen, params.c());
        let replace = match best {
            None => true,
            Some(plan) => {
                value > plan.value
                    || (value == plan.value
                        && plan_lex_cmp(chosen, &plan.steps) == std::cmp::Ordering::Less)
            }
        };
        if replace {
            *best = Some(Plan {
                steps: chosen.clone(),
                value,
            });
        }
        return;
    }
    for w in &s.omega {
        let used = chosen.iter().any(|p| p.id == w.id);
        let clashes = chosen.iter().any(|p| !l_separated(p, w, params.l()));
        if used || clashes {
            continue;
        }
        chosen.push(*w);
        enumerate(s, horizon, params, chosen, best);
        chosen.pop();
    }
}
