//! Domain types and the deterministic void-zone dynamics shared by every
//! solver and policy.
//!
//! A state is a plan space (the set of currently plannable grasps) plus the
//! tool mounted on the robot. Executing a grasp yields its success score,
//! minus a fixed penalty if it requires a tool change, and removes every
//! proposal within the void radius `l` of the executed position — including
//! the executed proposal itself, which is never separated from itself.
//!
//! All functions here are pure; values are immutable once constructed and
//! safe to share across threads.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{GtspError, Result};
use crate::scalar::Scalar;

/// End-effector identifier.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ToolId(pub u32);

/// Instance-unique proposal ordinal, used for deterministic tie-breaking.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ProposalId(pub u32);

/// One plannable grasp: a tool, a planar position, and a success score.
///
/// Positions are real-valued pairs in one consistent unit per instance
/// (grid cells for synthetic instances, millimeters for robot-derived
/// ones); grid-derived instances store integer coordinates in the same
/// representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspProposal<T> {
    pub id: ProposalId,
    pub tool: ToolId,
    pub x: T,
    pub y: T,
    /// Success probability, in `[0, 1]`.
    pub rho: T,
}

impl<T: Scalar> GraspProposal<T> {
    /// Builds a proposal, rejecting scores outside `[0, 1]`.
    pub fn new(id: ProposalId, tool: ToolId, x: T, y: T, rho: T) -> Result<Self> {
        if rho < T::zero() || rho > T::one() || rho.is_nan() {
            return Err(GtspError::invalid(format!(
                "rho must be in [0, 1], got {rho} (proposal id {})",
                id.0
            )));
        }
        Ok(GraspProposal {
            id,
            tool,
            x,
            y,
            rho,
        })
    }

    /// Squared Euclidean distance between two proposal positions.
    pub fn distance_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// The global deterministic ordering used for every tie-break in the
/// toolkit: descending score, then ascending tool id, then ascending
/// proposal id. Identical inputs therefore produce identical plans on
/// every run and platform.
pub fn global_cmp<T: Scalar>(a: &GraspProposal<T>, b: &GraspProposal<T>) -> Ordering {
    b.rho
        .partial_cmp(&a.rho)
        .unwrap_or(Ordering::Equal)
        .then(a.tool.cmp(&b.tool))
        .then(a.id.cmp(&b.id))
}

/// Current plan space plus the mounted tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanState<T> {
    /// The plannable grasps. Proposal ids must be distinct.
    pub omega: Vec<GraspProposal<T>>,
    /// The tool currently mounted on the robot.
    pub tool: ToolId,
}

impl<T: Scalar> PlanState<T> {
    pub fn new(omega: Vec<GraspProposal<T>>, tool: ToolId) -> Self {
        PlanState { omega, tool }
    }

    /// Distinct tools present in the plan space, ascending.
    pub fn tools_present(&self) -> Vec<ToolId> {
        let mut tools: Vec<ToolId> = self.omega.iter().map(|w| w.tool).collect();
        tools.sort();
        tools.dedup();
        tools
    }
}

/// Reward parameters: the (strictly negative) tool-change cost `c` and the
/// void radius `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams<T> {
    c: T,
    l: T,
}

impl<T: Scalar> RewardParams<T> {
    /// Validates `c < 0` and `l >= 0`.
    pub fn new(c: T, l: T) -> Result<Self> {
        if c.is_nan() || c >= T::zero() {
            return Err(GtspError::invalid(format!(
                "tool-change cost c must be strictly negative, got {c}"
            )));
        }
        if l.is_nan() || l < T::zero() {
            return Err(GtspError::invalid(format!(
                "void radius l must be nonnegative, got {l}"
            )));
        }
        Ok(RewardParams { c, l })
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn l(&self) -> T {
        self.l
    }
}

/// An ordered grasp sequence with its return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan<T> {
    pub steps: Vec<GraspProposal<T>>,
    pub value: T,
}

impl<T: Scalar> Plan<T> {
    pub fn empty() -> Self {
        Plan {
            steps: Vec::new(),
            value: T::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of tool changes along the plan starting from `initial_tool`.
    pub fn tool_changes(&self, initial_tool: ToolId) -> usize {
        let mut tool = initial_tool;
        let mut changes = 0;
        for step in &self.steps {
            if step.tool != tool {
                changes += 1;
                tool = step.tool;
            }
        }
        changes
    }

    /// Step ids in execution order.
    pub fn step_ids(&self) -> Vec<ProposalId> {
        self.steps.iter().map(|w| w.id).collect()
    }
}

/// Lexicographic comparison of plans under the global step ordering,
/// used to break ties among equal-value optima.
pub fn plan_lex_cmp<T: Scalar>(a: &[GraspProposal<T>], b: &[GraspProposal<T>]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = global_cmp(x, y);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

/// True iff `a` and `b` are strictly farther apart than `l`.
///
/// The comparison is on squared distances, so integer-coordinate
/// boundary cases (`d == l`) are decided exactly: a pair at distance
/// exactly `l` is *not* separated. A proposal is never separated from
/// itself.
pub fn l_separated<T: Scalar>(a: &GraspProposal<T>, b: &GraspProposal<T>, l: T) -> bool {
    a.distance_sq(b) > l * l
}

/// One-step reward: the grasp score, minus the swap penalty when the
/// proposal's tool differs from the mounted one.
pub fn step_reward<T: Scalar>(current_tool: ToolId, w: &GraspProposal<T>, c: T) -> T {
    if w.tool != current_tool {
        w.rho + c
    } else {
        w.rho
    }
}

/// Deterministic void-zone transition: executing `w` mounts its tool and
/// removes every proposal within distance `l` of it (including `w`).
pub fn apply_action<T: Scalar>(
    s: &PlanState<T>,
    w: &GraspProposal<T>,
    l: T,
) -> Result<PlanState<T>> {
    if !s.omega.iter().any(|p| p == w) {
        return Err(GtspError::ActionNotInPlanSpace(w.id.0));
    }
    let omega = s
        .omega
        .iter()
        .filter(|p| l_separated(p, w, l))
        .cloned()
        .collect();
    Ok(PlanState {
        omega,
        tool: w.tool,
    })
}

/// Return of a grasp sequence: the sum of step rewards with the tool
/// carried forward from `initial_tool`. An empty sequence is worth zero.
pub fn plan_value<T: Scalar>(initial_tool: ToolId, steps: &[GraspProposal<T>], c: T) -> T {
    let mut tool = initial_tool;
    let mut value = T::zero();
    for w in steps {
        value = value + step_reward(tool, w, c);
        tool = w.tool;
    }
    value
}

/// Tolerance for comparing a stored plan value against its recomputation.
pub const VALUE_TOL: f64 = 1e-9;

/// A single feasibility violation found by [`validate_plan`].
#[derive(Debug, Clone, PartialEq)]
pub enum PlanViolation {
    /// A step is not a member of the plan space it claims to come from.
    StepNotInPlanSpace { id: ProposalId },
    /// The plan does not have exactly the requested number of steps.
    WrongLength { expected: usize, actual: usize },
    /// Two steps are within the void radius of each other.
    NotSeparated {
        first: ProposalId,
        second: ProposalId,
    },
    /// The stored value disagrees with the recomputed return.
    ValueMismatch { stored: f64, recomputed: f64 },
}

/// Result of checking a plan against the feasibility contract shared by
/// all solvers. Passing means: every step is drawn from the state's plan
/// space, the plan has exactly `h` steps, all step pairs are separated,
/// and the stored value matches the recomputed return within
/// [`VALUE_TOL`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<PlanViolation>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_plan<T: Scalar>(
    s: &PlanState<T>,
    plan: &Plan<T>,
    params: &RewardParams<T>,
    h: usize,
) -> ValidationReport {
    let mut violations = Vec::new();

    for step in &plan.steps {
        if !s.omega.iter().any(|p| p == step) {
            violations.push(PlanViolation::StepNotInPlanSpace { id: step.id });
        }
    }
    if plan.len() != h {
        violations.push(PlanViolation::WrongLength {
            expected: h,
            actual: plan.len(),
        });
    }
    for (i, a) in plan.steps.iter().enumerate() {
        for b in &plan.steps[i + 1..] {
            if !l_separated(a, b, params.l()) {
                violations.push(PlanViolation::NotSeparated {
                    first: a.id,
                    second: b.id,
                });
            }
        }
    }
    let recomputed = plan_value(s.tool, &plan.steps, params.c()).to_f64();
    let stored = plan.value.to_f64();
    if (recomputed - stored).abs() > VALUE_TOL {
        violations.push(PlanViolation::ValueMismatch { stored, recomputed });
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prop(id: u32, tool: u32, x: f64, y: f64, rho: f64) -> GraspProposal<f64> {
        GraspProposal::new(ProposalId(id), ToolId(tool), x, y, rho).unwrap()
    }

    #[test]
    fn separation_is_strict() {
        let a = prop(0, 1, 0.0, 0.0, 0.5);
        let b = prop(1, 1, 5.0, 0.0, 0.5);
        assert!(!l_separated(&a, &b, 10.0));

        let c = prop(2, 1, 0.0, 0.0, 0.5);
        assert!(!l_separated(&a, &c, 0.0)); // d = 0 is not > 0

        let d = prop(3, 2, 3.0, 4.0, 0.1);
        let e = prop(4, 2, 0.0, 0.0, 0.1);
        assert!(l_separated(&d, &e, 4.999)); // d = 5
        assert!(!l_separated(&d, &e, 5.0)); // boundary is voided
    }

    #[test]
    fn step_reward_charges_only_on_swap() {
        let same = prop(0, 1, 0.0, 0.0, 0.9);
        assert_eq!(step_reward(ToolId(1), &same, -0.2), 0.9);

        let other = prop(1, 2, 0.0, 0.0, 0.9);
        assert!((step_reward(ToolId(1), &other, -0.2) - 0.7).abs() < 1e-12);

        let zero = prop(2, 2, 0.0, 0.0, 0.0);
        assert_eq!(step_reward(ToolId(2), &zero, -0.2), 0.0);
    }

    #[test]
    fn apply_action_voids_nearby_and_self() {
        let w1 = prop(1, 1, 0.0, 0.0, 0.9);
        let w2 = prop(2, 1, 5.0, 0.0, 0.8);
        let w3 = prop(3, 2, 100.0, 0.0, 0.7);
        let s = PlanState::new(vec![w1, w2, w3], ToolId(2));

        let next = apply_action(&s, &w1, 10.0).unwrap();
        assert_eq!(next.omega, vec![w3]);
        assert_eq!(next.tool, w1.tool);
    }

    #[test]
    fn apply_action_removes_the_last_proposal() {
        let w1 = prop(1, 1, 3.0, 4.0, 0.9);
        let s = PlanState::new(vec![w1], ToolId(1));
        let next = apply_action(&s, &w1, 0.0).unwrap();
        assert!(next.omega.is_empty());
    }

    #[test]
    fn apply_action_agrees_with_a_direct_distance_filter() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(40);
        for _ in 0..20 {
            let omega: Vec<_> = (0..20)
                .map(|i| {
                    prop(
                        i,
                        rng.random_range(0..3),
                        rng.random_range(0.0..120.0),
                        rng.random_range(0.0..120.0),
                        rng.random_range(0.0..=1.0),
                    )
                })
                .collect();
            let s = PlanState::new(omega.clone(), ToolId(0));
            let w = omega[rng.random_range(0..omega.len())];
            let next = apply_action(&s, &w, 20.0).unwrap();

            // Independent filter straight from the distance definition.
            let expected: Vec<_> = omega
                .iter()
                .filter(|p| {
                    let d = ((p.x - w.x).powi(2) + (p.y - w.y).powi(2)).sqrt();
                    d > 20.0
                })
                .copied()
                .collect();
            assert_eq!(next.omega, expected);
        }
    }

    #[test]
    fn apply_action_rejects_foreign_proposal() {
        let w1 = prop(1, 1, 0.0, 0.0, 0.9);
        let stranger = prop(9, 1, 1.0, 1.0, 0.5);
        let s = PlanState::new(vec![w1], ToolId(1));
        assert_eq!(
            apply_action(&s, &stranger, 1.0),
            Err(GtspError::ActionNotInPlanSpace(9))
        );
    }

    #[test]
    fn plan_value_examples() {
        assert_eq!(plan_value(ToolId(1), &[], -0.2), 0.0);

        let steps = [prop(0, 2, 0.0, 0.0, 0.8), prop(1, 2, 10.0, 0.0, 0.6)];
        assert!((plan_value(ToolId(1), &steps, -0.2) - 1.2).abs() < 1e-12);

        let steps = [
            prop(0, 1, 0.0, 0.0, 0.5),
            prop(1, 2, 10.0, 0.0, 0.5),
            prop(2, 1, 20.0, 0.0, 0.5),
        ];
        assert!((plan_value(ToolId(1), &steps, -0.1) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn reward_params_reject_bad_config() {
        assert!(RewardParams::new(-0.2, 20.0).is_ok());
        assert!(RewardParams::new(0.0, 20.0).is_err());
        assert!(RewardParams::new(0.2, 20.0).is_err());
        assert!(RewardParams::new(-0.2, -1.0).is_err());
    }

    #[test]
    fn proposal_rejects_bad_rho() {
        assert!(GraspProposal::new(ProposalId(0), ToolId(0), 0.0, 0.0, 1.01).is_err());
        assert!(GraspProposal::new(ProposalId(0), ToolId(0), 0.0, 0.0, -0.1).is_err());
        assert!(GraspProposal::new(ProposalId(0), ToolId(0), 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn global_ordering_breaks_ties_by_tool_then_id() {
        let a = prop(5, 2, 0.0, 0.0, 0.9);
        let b = prop(3, 1, 0.0, 0.0, 0.9);
        let c = prop(1, 2, 0.0, 0.0, 0.9);
        let d = prop(0, 0, 0.0, 0.0, 0.95);
        let mut v = [a, b, c, d];
        v.sort_by(global_cmp);
        assert_eq!(
            v.iter().map(|w| w.id.0).collect::<Vec<_>>(),
            vec![0, 3, 1, 5]
        );
    }

    #[test]
    fn validate_plan_flags_boundary_pairs_and_tampered_values() {
        let params = RewardParams::new(-0.2, 5.0).unwrap();
        let w1 = prop(1, 1, 0.0, 0.0, 0.9);
        let w2 = prop(2, 1, 5.0, 0.0, 0.8); // exactly at distance l
        let s = PlanState::new(vec![w1, w2], ToolId(1));

        let plan = Plan {
            steps: vec![w1, w2],
            value: plan_value(ToolId(1), &[w1, w2], -0.2),
        };
        let report = validate_plan(&s, &plan, &params, 2);
        assert!(!report.pass());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PlanViolation::NotSeparated { .. })));

        let params_wide = RewardParams::new(-0.2, 4.0).unwrap();
        let good = validate_plan(&s, &plan, &params_wide, 2);
        assert!(good.pass(), "{:?}", good);

        let tampered = Plan {
            steps: plan.steps.clone(),
            value: plan.value + 1.0,
        };
        let report = validate_plan(&s, &tampered, &params_wide, 2);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PlanViolation::ValueMismatch { .. })));

        let report = validate_plan(&s, &plan, &params_wide, 3);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            PlanViolation::WrongLength {
                expected: 3,
                actual: 2
            }
        )));

        let foreign = Plan {
            steps: vec![prop(9, 1, 50.0, 0.0, 0.4)],
            value: 0.4,
        };
        let report = validate_plan(&s, &foreign, &params_wide, 1);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PlanViolation::StepNotInPlanSpace { id: ProposalId(9) })));
    }

    #[test]
    fn coexisting_proposals_at_one_position_void_together() {
        // Two tools proposing the same cell: executing either removes both.
        let w1 = prop(1, 1, 4.0, 4.0, 0.9);
        let w2 = prop(2, 2, 4.0, 4.0, 0.8);
        let s = PlanState::new(vec![w1, w2], ToolId(1));
        let next = apply_action(&s, &w1, 0.0).unwrap();
        assert!(next.omega.is_empty());
    }

    fn arb_proposal() -> impl Strategy<Value = GraspProposal<f64>> {
        (
            0..10_000u32,
            0..4u32,
            -50.0..50.0f64,
            -50.0..50.0f64,
            0.0..=1.0f64,
        )
            .prop_map(|(id, tool, x, y, rho)| prop(id, tool, x, y, rho))
    }

    proptest! {
        #[test]
        fn separation_is_symmetric(a in arb_proposal(), b in arb_proposal(), l in 0.0..100.0f64) {
            prop_assert_eq!(l_separated(&a, &b, l), l_separated(&b, &a, l));
        }

        #[test]
        fn separation_is_anti_reflexive(a in arb_proposal(), l in 0.0..100.0f64) {
            prop_assert!(!l_separated(&a, &a, l));
        }

        #[test]
        fn voiding_shrinks_the_plan_space(
            mut omega in proptest::collection::vec(arb_proposal(), 1..20),
            pick in any::<prop::sample::Index>(),
            l in 0.0..60.0f64,
        ) {
            for (i, w) in omega.iter_mut().enumerate() {
                w.id = ProposalId(i as u32);
            }
            let w = omega[pick.index(omega.len())];
            let s = PlanState::new(omega.clone(), ToolId(0));
            let next = apply_action(&s, &w, l).unwrap();

            prop_assert!(next.omega.len() < s.omega.len());
            for p in &next.omega {
                prop_assert!(p.distance_sq(&w) > l * l);
            }

            // With l = 0 exactly the colocated proposals disappear.
            let zero = apply_action(&s, &w, 0.0).unwrap();
            let colocated = s
                .omega
                .iter()
                .filter(|p| p.x == w.x && p.y == w.y)
                .count();
            prop_assert_eq!(zero.omega.len(), s.omega.len() - colocated);
        }

        #[test]
        fn step_rewards_telescope_to_plan_value(
            mut steps in proptest::collection::vec(arb_proposal(), 0..12),
            c in -1.0..-1e-6f64,
        ) {
            for (i, w) in steps.iter_mut().enumerate() {
                w.id = ProposalId(i as u32);
            }
            let mut tool = ToolId(1);
            let mut acc = 0.0;
            for w in &steps {
                acc += step_reward(tool, w, c);
                tool = w.tool;
            }
            prop_assert!((acc - plan_value(ToolId(1), &steps, c)).abs() < 1e-12);
        }
    }
}
