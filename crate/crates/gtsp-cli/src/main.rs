//! Command line interface for the gtsp planning toolkit.
//!
//! Subcommands:
//! * `gen`      — write a batch of synthetic problem instances
//! * `solve`    — run one solver on one instance and print the plan
//! * `episode`  — simulate one episode and write its event log
//! * `metrics`  — score episode logs as CSV
//! * `ablation` — solver ablation grid (results + optional timing CSV)
//! * `bench`    — paired policy comparison on simulated episodes

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gtsp::bench::{
    ablation_csv, ablation_timing_csv, policy_bench_csv, run_ablation, run_policy_bench,
    AblationConfig, PolicyBenchConfig,
};
use gtsp::exact::solve_exact;
use gtsp::instance::PlanRecord;
use gtsp::metrics::{beta_tc_score, parse_event_log, psr_tcr, throughput};
use gtsp::model::ToolId;
use gtsp::rng::{derive_seeds, rng_from_seed};
use gtsp::sim::{run_episode, EpisodeLog, MpcConfig, Policy, WorldParams};
use gtsp::sts::{sts, StsConfig};
use gtsp::synth::{sample_instance, GenParams};
use gtsp::{BinWorld64, Instance64, RewardParams64};

#[derive(Parser)]
#[command(
    name = "gtsp",
    version,
    about = "Grasp tool selection planning toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a batch of synthetic problem instances into a directory.
    Gen(GenArgs),
    /// Solve one instance with one solver and print the plan record.
    Solve(SolveArgs),
    /// Simulate one episode and write a T/F/S event log.
    Episode(EpisodeArgs),
    /// Score episode logs and emit one CSV row per log.
    Metrics(MetricsArgs),
    /// Run the solver ablation grid and write the results CSV.
    Ablation(AblationArgs),
    /// Run the paired policy comparison and write the results CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for instance files.
    #[arg(long)]
    out: PathBuf,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    n_tools: usize,
    #[arg(long, default_value_t = 70)]
    grid_h: usize,
    #[arg(long, default_value_t = 110)]
    grid_w: usize,
    /// Object centers per instance.
    #[arg(long, default_value_t = 25)]
    m: usize,
    /// Proposals extracted per tool.
    #[arg(long, default_value_t = 10)]
    top_m: usize,
    #[arg(long, default_value_t = 3.0)]
    sigma_scale: f64,
    /// Planning horizon stored in the instance.
    #[arg(long, default_value_t = 3)]
    horizon: usize,
    /// Tool-change cost (negative).
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    c: f64,
    /// Void radius.
    #[arg(long, default_value_t = 20.0)]
    l: f64,
    /// Sparsity factor stored in the instance.
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to solve.
    instance: PathBuf,
    /// Solver: "exact" or "sts".
    #[arg(long, default_value = "sts")]
    solver: String,
    /// Write the plan record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EpisodeArgs {
    /// Output path for the event log.
    #[arg(long)]
    out: PathBuf,
    /// Policy: exact, sts, naive-greedy, greedy, or randomized.
    #[arg(long, default_value = "sts")]
    solver: Policy,
    #[arg(long, default_value_t = 2)]
    horizon: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 20.0)]
    l: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_attempts: usize,
    /// Tool mounted at episode start.
    #[arg(long, default_value_t = 0)]
    initial_tool: u32,
    #[arg(long, default_value_t = 70)]
    grid_h: usize,
    #[arg(long, default_value_t = 110)]
    grid_w: usize,
    /// Objects initially in the bin.
    #[arg(long, default_value_t = 25)]
    objects: usize,
    #[arg(long, default_value_t = 2)]
    n_tools: usize,
    #[arg(long, default_value_t = 3.0)]
    sigma_scale: f64,
    #[arg(long, default_value_t = 0.3)]
    p_disturb: f64,
    #[arg(long, default_value_t = 5)]
    jitter_radius: usize,
    /// Proposals observed per tool.
    #[arg(long, default_value_t = 10)]
    top_m: usize,
    #[arg(long, default_value_t = 1.0)]
    pick_time: f64,
    #[arg(long, default_value_t = 3.0)]
    tool_change_time: f64,
}

#[derive(Args)]
struct MetricsArgs {
    /// Episode log files.
    logs: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.33)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pick_time: f64,
    #[arg(long, default_value_t = 3.0)]
    tc_time: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AblationArgs {
    /// JSON config; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV (deterministic given config + seed).
    #[arg(long)]
    out: PathBuf,
    /// Wall-clock medians CSV (environment-dependent).
    #[arg(long)]
    timing_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON config; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Episode(args) => cmd_episode(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Ablation(args) => cmd_ablation(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let seeds = derive_seeds(args.seed, args.count);
    for (i, seed) in seeds.into_iter().enumerate() {
        let gp = GenParams {
            grid_h: args.grid_h,
            grid_w: args.grid_w,
            m: args.m,
            n_tools: args.n_tools,
            top_m: args.top_m,
            sigma_scale: args.sigma_scale,
            seed,
        };
        let instance = sample_instance::<f64>(&gp, args.horizon, args.c, args.l, args.k)?;
        let path = args.out.join(format!("instance_{i:04}.json"));
        instance.write_file(&path)?;
    }
    println!("wrote {} instances to {}", args.count, args.out.display());
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let instance = Instance64::read_file(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let state = instance.plan_state();
    let params = instance.reward_params()?;
    let h = instance.params.horizon;

    let start = std::time::Instant::now();
    let record = match args.solver.as_str() {
        "exact" => {
            let solved = solve_exact(&state, h, &params)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            PlanRecord::new("exact", None, &solved.plan, ms, solved.nodes_expanded)
        }
        "sts" => {
            let cfg = StsConfig::new(h, instance.params.k, params)?;
            let solved = sts(&state, &cfg);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            PlanRecord::new(
                "sts",
                Some(instance.params.k),
                &solved.plan,
                ms,
                solved.nodes_expanded,
            )
        }
        other => bail!("unknown solver {other:?} (expected \"exact\" or \"sts\")"),
    };

    let json = record.to_json();
    match args.out {
        Some(path) => fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_episode(args: EpisodeArgs) -> Result<()> {
    let world_params = WorldParams {
        grid_h: args.grid_h,
        grid_w: args.grid_w,
        objects: args.objects,
        n_tools: args.n_tools,
        sigma_scale: args.sigma_scale,
        p_disturb: args.p_disturb,
        jitter_radius: args.jitter_radius,
        top_m: args.top_m,
        pick_time: args.pick_time,
        tool_change_time: args.tool_change_time,
    };
    let mut rng = rng_from_seed(args.seed);
    let mut world = BinWorld64::generate(world_params, &mut rng)?;
    let cfg = MpcConfig::new(args.horizon, args.k, RewardParams64::new(args.c, args.l)?);
    let log = run_episode(
        &mut world,
        args.solver,
        &cfg,
        ToolId(args.initial_tool),
        args.max_attempts,
        &mut rng,
    );
    let header = vec![format!(
        "solver={} horizon={} k={} c={} l={} seed={} max_attempts={}",
        args.solver, args.horizon, args.k, args.c, args.l, args.seed, args.max_attempts
    )];
    log.write_file(&args.out, &header)?;
    let counts = log.counts();
    println!(
        "episode: {} events (tc={} pa={} ps={}), {} model-seconds -> {}",
        log.records.len(),
        counts.tc,
        counts.pa,
        counts.ps,
        log.elapsed(),
        args.out.display()
    );
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    if args.logs.is_empty() {
        bail!("no log files given");
    }
    let mut csv = String::from("log,tc,pa,ps,psr,tcr,tc_score,ps_per_hr\n");
    for path in &args.logs {
        let log =
            EpisodeLog::read_file(path).with_context(|| format!("reading {}", path.display()))?;
        let counts = parse_event_log(&log.event_string())?;
        let name = path.display();
        if counts.pa == 0 {
            csv.push_str(&format!("{name},{},0,0,,,,\n", counts.tc));
            continue;
        }
        let (psr, tcr) = psr_tcr::<f64>(&counts)?;
        let score = beta_tc_score(&counts, args.beta)?;
        let per_hr = throughput(&counts, args.pick_time, args.tc_time)?;
        csv.push_str(&format!(
            "{name},{},{},{},{psr},{tcr},{score},{per_hr}\n",
            counts.tc, counts.pa, counts.ps
        ));
    }
    match args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn load_config<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
        None => Ok(T::default()),
    }
}

fn cmd_ablation(args: AblationArgs) -> Result<()> {
    let mut cfg: AblationConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let rows = run_ablation(&cfg)?;
    fs::write(&args.out, ablation_csv(&rows))?;
    if let Some(path) = &args.timing_out {
        fs::write(path, ablation_timing_csv(&rows))?;
    }
    println!(
        "wrote {} ablation rows to {}",
        rows.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut cfg: PolicyBenchConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let rows = run_policy_bench(&cfg)?;
    fs::write(&args.out, policy_bench_csv(&rows))?;
    println!("wrote {} policy rows to {}", rows.len(), args.out.display());
    Ok(())
}
