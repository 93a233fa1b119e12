//! Synthetic problem generation: random per-tool grasp-score grids built
//! from Gaussian bumps around shared object centers.
//!
//! Each object center gets, per tool, a randomly scaled and widened
//! Gaussian kernel; the per-cell score is the clipped superposition of
//! all kernels. Scores therefore peak near object centers and stay in
//! `[0, 1]`, and different tools weight the same objects differently —
//! the shape a learned grasp model produces. The top-scoring cells of
//! each tool's grid become that tool's grasp proposals.
//!
//! Generation is fully determined by the seed (see [`crate::rng`]).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GtspError, Result};
use crate::instance::{ProblemInstance, SolverParams};
use crate::model::{GraspProposal, ProposalId, ToolId};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Synthetic generator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    /// Grid height (rows).
    pub grid_h: usize,
    /// Grid width (columns).
    pub grid_w: usize,
    /// Number of object centers shared by all tools.
    pub m: usize,
    /// Number of end-effectors.
    pub n_tools: usize,
    /// Proposals extracted per tool into the plan space.
    pub top_m: usize,
    /// Kernel width multiplier, in grid cells. Raw widths are drawn in
    /// `(0, 1]`, which is narrower than a cell; this scales them to a
    /// usable footprint.
    pub sigma_scale: f64,
    /// Master seed.
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            grid_h: 70,
            grid_w: 110,
            m: 25,
            n_tools: 2,
            top_m: 10,
            sigma_scale: 3.0,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("grid_h", self.grid_h),
            ("grid_w", self.grid_w),
            ("m", self.m),
            ("n_tools", self.n_tools),
            ("top_m", self.top_m),
        ] {
            if v < 1 {
                return Err(GtspError::invalid(format!("{name} must be >= 1")));
            }
        }
        if self.sigma_scale.is_nan() || self.sigma_scale <= 0.0 {
            return Err(GtspError::invalid("sigma_scale must be > 0"));
        }
        Ok(())
    }
}

/// One Gaussian kernel: a raw width in `(0, 1]` and a scale in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub sigma: f64,
    pub beta: f64,
}

impl Kernel {
    /// Draws `sigma ~ U(0, 1]` and `beta ~ U[0, 1)`.
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        Kernel {
            sigma: 1.0 - rng.random::<f64>(),
            beta: rng.random::<f64>(),
        }
    }
}

/// Contribution of one kernel at squared distance `d_sq` from its
/// center, with the width already scaled to grid cells.
pub fn bump_value(kernel: &Kernel, sigma_scale: f64, d_sq: f64) -> f64 {
    let sigma_s = sigma_scale * kernel.sigma;
    kernel.beta * (-d_sq / (2.0 * sigma_s * sigma_s)).exp()
}

/// A dense per-cell score field in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreGrid<T> {
    height: usize,
    width: usize,
    values: Vec<T>,
}

impl<T: Scalar> ScoreGrid<T> {
    pub fn from_values(height: usize, width: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), height * width);
        ScoreGrid {
            height,
            width,
            values,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Score at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    /// All cells as `(x, y, score)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i % self.width, i / self.width, v))
    }
}

/// Evaluates the clipped Gaussian superposition for explicit kernels.
pub fn gaussian_score_grid<T: Scalar>(
    grid_h: usize,
    grid_w: usize,
    centers: &[(usize, usize)],
    kernels: &[Kernel],
    sigma_scale: f64,
) -> ScoreGrid<T> {
    assert_eq!(centers.len(), kernels.len());
    let mut values = vec![0.0f64; grid_h * grid_w];
    for (&(cx, cy), kernel) in centers.iter().zip(kernels) {
        for y in 0..grid_h {
            for x in 0..grid_w {
                let dx = x as f64 - cx as f64;
                let dy = y as f64 - cy as f64;
                values[y * grid_w + x] += bump_value(kernel, sigma_scale, dx * dx + dy * dy);
            }
        }
    }
    let clipped = values
        .into_iter()
        .map(|v| T::from_f64(v.clamp(0.0, 1.0)))
        .collect();
    ScoreGrid::from_values(grid_h, grid_w, clipped)
}

/// Generates one tool's score grid: per center, draws a random kernel
/// and superposes the scaled bumps, clipping scores to `[0, 1]`.
pub fn generate_grasp_model<T: Scalar, R: Rng>(
    grid_h: usize,
    grid_w: usize,
    centers: &[(usize, usize)],
    sigma_scale: f64,
    rng: &mut R,
) -> ScoreGrid<T> {
    let kernels: Vec<Kernel> = centers.iter().map(|_| Kernel::sample(rng)).collect();
    gaussian_score_grid(grid_h, grid_w, centers, &kernels, sigma_scale)
}

/// Extracts the `top_m` highest-score cells as proposals for `tool`.
///
/// Equal scores resolve by ascending row-major cell index, so extraction
/// is deterministic. Ids are assigned sequentially from `id_base` in
/// rank order.
pub fn grid_to_proposals<T: Scalar>(
    grid: &ScoreGrid<T>,
    tool: ToolId,
    top_m: usize,
    id_base: u32,
) -> Vec<GraspProposal<T>> {
    let mut ranked: Vec<(usize, usize, T)> = grid.cells().collect();
    ranked.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.1, a.0).cmp(&(b.1, b.0)))
    });
    ranked
        .into_iter()
        .take(top_m)
        .enumerate()
        .map(|(rank, (x, y, score))| GraspProposal {
            id: ProposalId(id_base + rank as u32),
            tool,
            x: T::from_f64(x as f64),
            y: T::from_f64(y as f64),
            rho: score,
        })
        .collect()
}

/// Everything drawn while sampling an instance, for tests and for
/// building simulator worlds from the same distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    pub centers: Vec<(usize, usize)>,
    /// One kernel per center, per tool (outer index: tool).
    pub kernels_per_tool: Vec<Vec<Kernel>>,
    pub current_tool: ToolId,
}

/// Samples a complete problem instance, fully determined by the seed.
///
/// Draw order: the current tool, then the shared object centers, then
/// one kernel per center for each tool in ascending tool order.
pub fn sample_instance<T: Scalar>(
    gp: &GenParams,
    horizon: usize,
    c: T,
    l: T,
    k: usize,
) -> Result<ProblemInstance<T>> {
    sample_instance_meta(gp, horizon, c, l, k).map(|(instance, _)| instance)
}

/// [`sample_instance`] variant that also returns the sampled centers and
/// kernels.
pub fn sample_instance_meta<T: Scalar>(
    gp: &GenParams,
    horizon: usize,
    c: T,
    l: T,
    k: usize,
) -> Result<(ProblemInstance<T>, InstanceMeta)> {
    gp.validate()?;
    let mut rng = rng_from_seed(gp.seed);

    let current_tool = ToolId(rng.random_range(0..gp.n_tools as u32));
    let centers: Vec<(usize, usize)> = (0..gp.m)
        .map(|_| {
            (
                rng.random_range(0..gp.grid_w),
                rng.random_range(0..gp.grid_h),
            )
        })
        .collect();

    let mut proposals = Vec::with_capacity(gp.n_tools * gp.top_m);
    let mut kernels_per_tool = Vec::with_capacity(gp.n_tools);
    for tool in 0..gp.n_tools {
        let kernels: Vec<Kernel> = centers.iter().map(|_| Kernel::sample(&mut rng)).collect();
        let grid: ScoreGrid<T> =
            gaussian_score_grid(gp.grid_h, gp.grid_w, &centers, &kernels, gp.sigma_scale);
        proposals.extend(grid_to_proposals(
            &grid,
            ToolId(tool as u32),
            gp.top_m,
            proposals.len() as u32,
        ));
        kernels_per_tool.push(kernels);
    }

    let instance = ProblemInstance {
        tools: (0..gp.n_tools as u32).map(ToolId).collect(),
        current_tool,
        proposals,
        params: SolverParams { horizon, c, l, k },
    };
    instance.validate()?;
    Ok((
        instance,
        InstanceMeta {
            centers,
            kernels_per_tool,
            current_tool,
        },
    ))
}
