//! Serializable problem instances and solver output records.
//!
//! The instance file is the lingua franca of every CLI subcommand: a JSON
//! document bundling the per-tool grasp proposals, the currently mounted
//! tool, and the solver parameters.
//!
//! ```json
//! {
//!   "tools": [0, 1],
//!   "current_tool": 0,
//!   "proposals": [{"id": 0, "tool": 0, "x": 12.0, "y": 30.0, "rho": 0.93}],
//!   "params": {"H": 3, "c": -0.2, "l": 20.0, "k": 2}
//! }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GtspError, Result};
use crate::model::{GraspProposal, Plan, PlanState, RewardParams, ToolId};
use crate::scalar::Scalar;

/// Planner parameters carried inside an instance file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams<T> {
    /// Planning horizon (number of grasps per plan).
    #[serde(rename = "H")]
    pub horizon: usize,
    /// Tool-change cost, strictly negative.
    pub c: T,
    /// Void radius, nonnegative.
    pub l: T,
    /// Sparsity factor for the tree-search solver.
    pub k: usize,
}

/// A complete, serializable planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance<T> {
    pub tools: Vec<ToolId>,
    pub current_tool: ToolId,
    pub proposals: Vec<GraspProposal<T>>,
    pub params: SolverParams<T>,
}

impl<T: Scalar> ProblemInstance<T> {
    /// Checks every instance invariant: distinct proposal ids, scores in
    /// `[0, 1]`, tools drawn from the declared tool set, and valid solver
    /// parameters.
    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u32> = self.proposals.iter().map(|p| p.id.0).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(GtspError::invalid("proposal ids must be unique"));
        }
        for p in &self.proposals {
            if p.rho < T::zero() || p.rho > T::one() || p.rho.is_nan() {
                return Err(GtspError::invalid(format!(
                    "proposal {} has rho {} outside [0, 1]",
                    p.id.0, p.rho
                )));
            }
            if !self.tools.contains(&p.tool) {
                return Err(GtspError::invalid(format!(
                    "proposal {} uses tool {} not in the tool set",
                    p.id.0, p.tool.0
                )));
            }
        }
        if !self.tools.contains(&self.current_tool) {
            return Err(GtspError::invalid(format!(
                "current tool {} is not in the tool set",
                self.current_tool.0
            )));
        }
        if self.params.horizon < 1 {
            return Err(GtspError::invalid("horizon H must be >= 1"));
        }
        if self.params.k < 1 {
            return Err(GtspError::invalid("sparsity factor k must be >= 1"));
        }
        self.reward_params().map(|_| ())
    }

    /// The validated reward parameters of this instance.
    pub fn reward_params(&self) -> Result<RewardParams<T>> {
        RewardParams::new(self.params.c, self.params.l)
    }

    /// The initial planning state.
    pub fn plan_state(&self) -> PlanState<T> {
        PlanState::new(self.proposals.clone(), self.current_tool)
    }
}

impl<T: Scalar + Serialize + for<'de> Deserialize<'de>> ProblemInstance<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, FileError> {
        let instance: ProblemInstance<T> = serde_json::from_str(s)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> std::result::Result<(), FileError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> std::result::Result<Self, FileError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Solver output record emitted by the `solve` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    /// Which solver produced the plan ("exact" or "sts").
    pub solver: String,
    /// Sparsity factor, recorded for the tree-search solver only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Proposal ids in execution order.
    pub steps: Vec<u32>,
    pub value: f64,
    pub solve_time_ms: f64,
    pub nodes_expanded: u64,
}

impl PlanRecord {
    pub fn new<T: Scalar>(
        solver: &str,
        k: Option<usize>,
        plan: &Plan<T>,
        solve_time_ms: f64,
        nodes_expanded: u64,
    ) -> Self {
        PlanRecord {
            solver: solver.to_string(),
            k,
            steps: plan.steps.iter().map(|w| w.id.0).collect(),
            value: plan.value.to_f64(),
            solve_time_ms,
            nodes_expanded,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialization cannot fail")
    }
}

/// Errors from reading or writing toolkit files.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] GtspError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProposalId;

    fn sample() -> ProblemInstance<f64> {
        ProblemInstance {
            tools: vec![ToolId(0), ToolId(1)],
            current_tool: ToolId(0),
            proposals: vec![
                GraspProposal::new(ProposalId(0), ToolId(0), 1.0, 2.0, 0.9).unwrap(),
                GraspProposal::new(ProposalId(1), ToolId(1), 30.0, 2.0, 0.8).unwrap(),
            ],
            params: SolverParams {
                horizon: 2,
                c: -0.2,
                l: 20.0,
                k: 2,
            },
        }
    }

    #[test]
    fn json_round_trip_preserves_instance() {
        let instance = sample();
        let parsed = ProblemInstance::<f64>::from_json(&instance.to_json()).unwrap();
        assert_eq!(instance, parsed);
    }

    #[test]
    fn wire_format_field_names() {
        let json = sample().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value["proposals"][0]["rho"].is_number());
        assert_eq!(value["params"]["H"], 2);
        assert_eq!(value["current_tool"], 0);
    }

    #[test]
    fn validation_rejects_duplicate_ids_and_foreign_tools() {
        let mut instance = sample();
        instance.proposals[1].id = ProposalId(0);
        assert!(instance.validate().is_err());

        let mut instance = sample();
        instance.proposals[1].tool = ToolId(7);
        assert!(instance.validate().is_err());

        let mut instance = sample();
        instance.current_tool = ToolId(9);
        assert!(instance.validate().is_err());

        let mut instance = sample();
        instance.params.c = 0.1;
        assert!(instance.validate().is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.json");
        let instance = sample();
        instance.write_file(&path).unwrap();
        let loaded = ProblemInstance::<f64>::read_file(&path).unwrap();
        assert_eq!(instance, loaded);
    }

    #[test]
    fn plan_record_omits_k_for_exact() {
        let plan: Plan<f64> = Plan {
            steps: vec![],
            value: 0.0,
        };
        let record = PlanRecord::new("exact", None, &plan, 1.5, 10);
        assert!(!record.to_json().contains("\"k\""));
        let record = PlanRecord::new("sts", Some(2), &plan, 1.5, 10);
        assert!(record.to_json().contains("\"k\": 2"));
    }
}
