//! Seeded benchmark harness: solver ablation grids and simulator policy
//! comparisons, with CSV output.
//!
//! The ablation sweeps (tool count, horizon, sparsity) over synthetic
//! instances, runs both solvers on each, and reports advantage
//! statistics and solve-time medians. Planning outcomes are fully
//! determined by the config and seed, so the results CSV is
//! byte-reproducible; wall-clock timings are measurements and live in a
//! separate CSV.
//!
//! The policy bench runs seeded episodes per policy on identical world
//! seeds (a paired comparison) and emits one aggregate row per policy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::error::{GtspError, Result};
use crate::exact::solve_exact;
use crate::metrics::{advantage, beta_tc_score, throughput, EventCounts, DEFAULT_BETA};
use crate::model::{RewardParams, ToolId};
use crate::rng::{derive_seeds, rng_from_seed};
use crate::sim::{run_episode, BinWorld, MpcConfig, Policy, WorldParams};
use crate::sts::{sts, StsConfig};
use crate::synth::{sample_instance, GenParams};

/// Nearest-rank percentiles of `values` at quantiles `qs` in `[0, 1]`.
///
/// After an ascending sort, quantile `q` maps to 1-based rank
/// `ceil(q * n)` (minimum 1), so `q = 0.5` of `[1, 2, 3, 4]` is `2` and
/// `q = 1` is always the maximum.
pub fn percentiles(values: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(GtspError::EmptyInput);
    }
    for &q in qs {
        if !(0.0..=1.0).contains(&q) {
            return Err(GtspError::invalid(format!("quantile {q} outside [0, 1]")));
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(qs
        .iter()
        .map(|&q| {
            let rank = ((q * sorted.len() as f64).ceil() as usize).max(1);
            sorted[rank - 1]
        })
        .collect())
}

fn median(values: &[f64]) -> f64 {
    percentiles(values, &[0.5]).expect("nonempty")[0]
}

/// Ablation grid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationConfig {
    /// Tool counts to sweep.
    pub n_tools: Vec<usize>,
    /// Horizons to sweep.
    pub horizons: Vec<usize>,
    /// Sparsity factors to sweep.
    pub ks: Vec<usize>,
    /// Instances per grid cell.
    pub instances: usize,
    pub seed: u64,
    pub c: f64,
    pub l: f64,
    pub grid_h: usize,
    pub grid_w: usize,
    /// Object centers per instance.
    pub m: usize,
    /// Proposals per tool.
    pub top_m: usize,
    pub sigma_scale: f64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        let gen = GenParams::default();
        AblationConfig {
            n_tools: vec![2, 3],
            horizons: vec![3, 4, 5, 6, 7],
            ks: vec![1, 2, 3],
            instances: 100,
            seed: 0,
            c: -0.2,
            l: 20.0,
            grid_h: gen.grid_h,
            grid_w: gen.grid_w,
            m: gen.m,
            top_m: gen.top_m,
            sigma_scale: gen.sigma_scale,
        }
    }
}

impl AblationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_tools.is_empty() || self.horizons.is_empty() || self.ks.is_empty() {
            return Err(GtspError::invalid("ablation grid axes must be nonempty"));
        }
        if self.instances < 1 {
            return Err(GtspError::invalid("instances must be >= 1"));
        }
        if self
            .n_tools
            .iter()
            .chain(&self.horizons)
            .chain(&self.ks)
            .any(|&v| v < 1)
        {
            return Err(GtspError::invalid("grid values must be >= 1"));
        }
        RewardParams::new(self.c, self.l).map(|_| ())
    }
}

/// One ablation grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub n_tools: usize,
    pub h: usize,
    pub k: usize,
    pub instances: usize,
    /// Instances contributing to the advantage statistics.
    pub included: usize,
    /// Instances excluded because the exact solver was infeasible or
    /// the tree search stopped short of the horizon.
    pub infeasible_or_partial: usize,
    pub adv_mean: Option<f64>,
    pub adv_p25: Option<f64>,
    pub adv_p75: Option<f64>,
    pub adv_max: Option<f64>,
    pub t_exact_median_ms: f64,
    pub t_sts_median_ms: f64,
}

struct InstanceOutcome {
    adv: Option<f64>,
    t_exact_ms: f64,
    t_sts_ms: f64,
}

/// Runs the full (tool count x horizon x sparsity) grid.
///
/// Every cell reuses the same per-index instance seeds, so cells with
/// equal tool counts see identical instances and differ only in solver
/// parameters. Per instance, wall-clock time is measured around each
/// solve call alone, with the solver order alternating by instance
/// parity to keep cache warmth even-handed.
pub fn run_ablation(cfg: &AblationConfig) -> Result<Vec<AblationRow>> {
    cfg.validate()?;
    let seeds = derive_seeds(cfg.seed, cfg.instances);
    let params = RewardParams::new(cfg.c, cfg.l)?;

    let mut rows = Vec::new();
    for &n_tools in &cfg.n_tools {
        for &h in &cfg.horizons {
            for &k in &cfg.ks {
                let outcomes: Vec<InstanceOutcome> = seeds
                    .par_iter()
                    .enumerate()
                    .map(|(i, &seed)| {
                        let gp = GenParams {
                            grid_h: cfg.grid_h,
                            grid_w: cfg.grid_w,
                            m: cfg.m,
                            n_tools,
                            top_m: cfg.top_m,
                            sigma_scale: cfg.sigma_scale,
                            seed,
                        };
                        let instance = sample_instance::<f64>(&gp, h, cfg.c, cfg.l, k)
                            .expect("validated generator parameters");
                        let state = instance.plan_state();
                        let sts_cfg = StsConfig::new(h, k, params).expect("validated parameters");

                        let run_exact = || {
                            let start = Instant::now();
                            let result = solve_exact(&state, h, &params);
                            (result, start.elapsed().as_secs_f64() * 1e3)
                        };
                        let run_sts = || {
                            let start = Instant::now();
                            let result = sts(&state, &sts_cfg);
                            (result, start.elapsed().as_secs_f64() * 1e3)
                        };
                        let ((exact_result, t_exact_ms), (sts_result, t_sts_ms)) = if i % 2 == 0 {
                            let e = run_exact();
                            let s = run_sts();
                            (e, s)
                        } else {
                            let s = run_sts();
                            let e = run_exact();
                            (e, s)
                        };

                        let adv = match (&exact_result, sts_result.plan.len() == h) {
                            (Ok(solved), true) => {
                                Some(advantage(solved.plan.value, sts_result.plan.value))
                            }
                            _ => None,
                        };
                        InstanceOutcome {
                            adv,
                            t_exact_ms,
                            t_sts_ms,
                        }
                    })
                    .collect();

                let advantages: Vec<f64> = outcomes.iter().filter_map(|o| o.adv).collect();
                let t_exact: Vec<f64> = outcomes.iter().map(|o| o.t_exact_ms).collect();
                let t_sts: Vec<f64> = outcomes.iter().map(|o| o.t_sts_ms).collect();

                let (adv_mean, adv_p25, adv_p75, adv_max) = if advantages.is_empty() {
                    (None, None, None, None)
                } else {
                    let qs = percentiles(&advantages, &[0.25, 0.75, 1.0])?;
                    let mean = advantages.iter().sum::<f64>() / advantages.len() as f64;
                    (Some(mean), Some(qs[0]), Some(qs[1]), Some(qs[2]))
                };

                rows.push(AblationRow {
                    n_tools,
                    h,
                    k,
                    instances: cfg.instances,
                    included: advantages.len(),
                    infeasible_or_partial: cfg.instances - advantages.len(),
                    adv_mean,
                    adv_p25,
                    adv_p75,
                    adv_max,
                    t_exact_median_ms: median(&t_exact),
                    t_sts_median_ms: median(&t_sts),
                });
            }
        }
    }
    rows.sort_by_key(|r| (r.n_tools, r.h, r.k));
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Deterministic ablation results (no wall-clock columns).
pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from(
        "n_tools,h,k,instances,included,infeasible_or_partial,adv_mean,adv_p25,adv_p75,adv_max\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n_tools,
            r.h,
            r.k,
            r.instances,
            r.included,
            r.infeasible_or_partial,
            opt(r.adv_mean),
            opt(r.adv_p25),
            opt(r.adv_p75),
            opt(r.adv_max),
        ));
    }
    out
}

/// Wall-clock medians per grid cell (environment-dependent).
pub fn ablation_timing_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("n_tools,h,k,t_exact_median_ms,t_sts_median_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n_tools, r.h, r.k, r.t_exact_median_ms, r.t_sts_median_ms
        ));
    }
    out
}

/// Policy comparison configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyBenchConfig {
    pub policies: Vec<Policy>,
    pub episodes: usize,
    pub seed: u64,
    pub world: WorldParams,
    pub horizon: usize,
    pub k: usize,
    pub c: f64,
    pub l: f64,
    pub beta: f64,
    pub max_attempts: usize,
    pub initial_tool: u32,
}

impl Default for PolicyBenchConfig {
    fn default() -> Self {
        PolicyBenchConfig {
            policies: vec![
                Policy::Randomized,
                Policy::NaiveGreedy,
                Policy::Greedy,
                Policy::Sts,
            ],
            episodes: 50,
            seed: 0,
            world: WorldParams::default(),
            horizon: 2,
            k: 2,
            c: -0.2,
            l: 20.0,
            beta: DEFAULT_BETA,
            max_attempts: 200,
            initial_tool: 0,
        }
    }
}

impl PolicyBenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(GtspError::invalid("at least one policy is required"));
        }
        if self.episodes < 1 || self.max_attempts < 1 {
            return Err(GtspError::invalid("episodes and max_attempts must be >= 1"));
        }
        if self.horizon < 1 || self.k < 1 {
            return Err(GtspError::invalid("horizon and k must be >= 1"));
        }
        if self.beta < 0.0 {
            return Err(GtspError::invalid("beta must be >= 0"));
        }
        self.world.validate()?;
        RewardParams::new(self.c, self.l).map(|_| ())
    }

    fn mpc_config(&self) -> MpcConfig<f64> {
        MpcConfig::new(
            self.horizon,
            self.k,
            RewardParams::new(self.c, self.l).expect("validated"),
        )
    }
}

/// Aggregate result for one policy across the paired episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyBenchRow {
    pub policy: Policy,
    pub episodes: usize,
    pub counts: EventCounts,
    /// Combined score of the aggregate counts (0 when no attempts).
    pub tc_score: f64,
    /// Successful picks per hour of model time (0 when no attempts).
    pub ps_per_hr: f64,
    /// Mean of per-episode scores, over episodes with attempts.
    pub mean_tc_score: Option<f64>,
    /// Set when the aggregate had no pick attempts at all.
    pub no_attempts: bool,
}

/// Runs seeded episodes per policy on identical world seeds and
/// aggregates the event counts per policy.
pub fn run_policy_bench(cfg: &PolicyBenchConfig) -> Result<Vec<PolicyBenchRow>> {
    cfg.validate()?;
    let world_seeds = derive_seeds(cfg.seed, cfg.episodes);
    let mpc = cfg.mpc_config();

    let mut rows = Vec::new();
    for &policy in &cfg.policies {
        let episode_counts: Vec<EventCounts> = world_seeds
            .par_iter()
            .map(|&seed| {
                let mut rng = rng_from_seed(seed);
                let mut world = BinWorld::<f64>::generate(cfg.world, &mut rng)
                    .expect("validated world parameters");
                let log = run_episode(
                    &mut world,
                    policy,
                    &mpc,
                    ToolId(cfg.initial_tool),
                    cfg.max_attempts,
                    &mut rng,
                );
                log.counts()
            })
            .collect();

        let mut total = EventCounts::default();
        for c in &episode_counts {
            total.add(c);
        }
        let per_episode: Vec<f64> = episode_counts
            .iter()
            .filter(|c| c.pa > 0)
            .map(|c| beta_tc_score(c, cfg.beta).expect("pa > 0"))
            .collect();

        let no_attempts = total.pa == 0;
        rows.push(PolicyBenchRow {
            policy,
            episodes: cfg.episodes,
            counts: total,
            tc_score: beta_tc_score(&total, cfg.beta).unwrap_or(0.0),
            ps_per_hr: throughput(&total, cfg.world.pick_time, cfg.world.tool_change_time)
                .unwrap_or(0.0),
            mean_tc_score: if per_episode.is_empty() {
                None
            } else {
                Some(per_episode.iter().sum::<f64>() / per_episode.len() as f64)
            },
            no_attempts,
        });
    }
    Ok(rows)
}

/// One aggregate row per policy: tool changes, attempts, successes, the
/// combined score, and throughput. A `no-attempts` flag marks rows whose
/// rate metrics are undefined and reported as zero.
pub fn policy_bench_csv(rows: &[PolicyBenchRow]) -> String {
    let mut out = String::from("policy,tc,pa,ps,tc_score,ps_per_hr,flags\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.policy,
            r.counts.tc,
            r.counts.pa,
            r.counts.ps,
            r.tc_score,
            r.ps_per_hr,
            if r.no_attempts { "no-attempts" } else { "" },
        ));
    }
    out
}
