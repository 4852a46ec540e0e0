//! Benchmark CLI: generate or ingest instances, run a single solver, run the
//! exact micro-scale oracle, and drive parameter sweeps.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use trmoa::gen::{generate_instance, GeneratorParams};
use trmoa::influence::build_exposure_index;
use trmoa::io::{
    ingest_csv, load_instance, save_instance, serialize_allocation, IngestOptions, IngestPaths,
    Manifest,
};
use trmoa::model::{validate_instance, Instance};
use trmoa::regret::RegretParams;
use trmoa::solver::{solve_with_index, Algorithm, OracleLimits, SolverConfig};
use trmoa::sweep::{
    parse_grid, render_summary_csv, rows_from_results_csv, run_sweep_to_dir, summarize,
};
use trmoa::tags::TagSelectionParams;

#[derive(Parser)]
#[command(
    name = "trmoa",
    about = "Tag-specific regret minimization for billboard slot allocation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance directory.
    Gen(GenArgs),
    /// Assemble an instance directory from raw CSV files.
    Ingest(IngestArgs),
    /// Solve one instance with one algorithm.
    Run(RunArgs),
    /// Exact enumeration on a micro instance (guarded by size limits).
    Oracle(OracleArgs),
    /// Run an algorithm x parameter grid and emit results.csv.
    Sweep(SweepArgs),
    /// Aggregate a results.csv into per-cell summary statistics.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 200)]
    users: usize,
    #[arg(long, default_value_t = 30)]
    boards: usize,
    #[arg(long, default_value_t = 50)]
    tags: usize,
    #[arg(long, default_value_t = 0)]
    t1: i64,
    #[arg(long, default_value_t = 43_200)]
    t2: i64,
    #[arg(long, default_value_t = 900)]
    slot_duration: i64,
    #[arg(long, default_value_t = 100.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest and largest advertiser tag list, clipped to the universe.
    #[arg(long, default_value_t = 100)]
    tag_count_min: usize,
    #[arg(long, default_value_t = 500)]
    tag_count_max: usize,
    /// Output instance directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    trajectories: PathBuf,
    #[arg(long)]
    affinities: PathBuf,
    #[arg(long)]
    billboards: PathBuf,
    #[arg(long)]
    advertisers: PathBuf,
    #[arg(long, default_value_t = 0)]
    t1: i64,
    #[arg(long)]
    t2: i64,
    #[arg(long, default_value_t = 900)]
    slot_duration: i64,
    #[arg(long, default_value_t = 100.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgoArg {
    Bg,
    Rg,
    Rls,
    Random,
    Oracle,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Bg => Algorithm::Bg,
            AlgoArg::Rg => Algorithm::Rg,
            AlgoArg::Rls => Algorithm::Rls,
            AlgoArg::Random => Algorithm::Random,
            AlgoArg::Oracle => Algorithm::Oracle,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ScoreContextArg {
    Tag,
    Full,
}

#[derive(Copy, Clone, ValueEnum)]
enum ScoreDenominatorArg {
    Cost,
    Influence,
}

#[derive(Args)]
struct SolveFlags {
    /// Stochastic-greedy sampling parameter.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Local search iterations.
    #[arg(long, default_value_t = 20)]
    rls_iters: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Penalty ratio for unsatisfied demand.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Adaptive tag-selection stopping fraction.
    #[arg(long, default_value_t = 0.01)]
    omega: f64,
    /// Exposure distance in meters; defaults to the instance manifest's
    /// gamma, then 100.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum, default_value = "tag")]
    score_context: ScoreContextArg,
    #[arg(long, value_enum, default_value = "cost")]
    score_denominator: ScoreDenominatorArg,
    /// Stop serving an advertiser once every candidate would cost more
    /// regret than stopping.
    #[arg(long)]
    early_stop: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Instance directory (from `gen` or `ingest`).
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[command(flatten)]
    flags: SolveFlags,
    /// Write the allocation text here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    flags: SolveFlags,
    /// Refuse instances with more slots than this.
    #[arg(long, default_value_t = 12)]
    max_slots: usize,
    /// Refuse instances with more advertisers than this.
    #[arg(long, default_value_t = 3)]
    max_advertisers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid file (key=value lines; see the book's benchmarking chapter).
    #[arg(long)]
    grid: PathBuf,
    /// Comma-separated algorithms, overriding the grid file.
    #[arg(long)]
    algos: Option<String>,
    /// Seeds per cell, overriding the grid file.
    #[arg(long)]
    seeds: Option<u32>,
    /// Master seed, overriding the grid file.
    #[arg(long)]
    master_seed: Option<u64>,
    /// Output directory for results.csv, timings.csv and trace/.
    #[arg(long)]
    out: PathBuf,
    /// Exit nonzero if any cell was flagged with a solver error.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Path to a results.csv produced by `sweep`.
    #[arg(long)]
    results: PathBuf,
    /// Matching timings.csv for mean wall-clock columns.
    #[arg(long)]
    timings: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Ingest(args) => cmd_ingest(args),
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Summarize(args) => cmd_summarize(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let params = GeneratorParams {
        alpha: args.alpha,
        beta: args.beta,
        user_count: args.users,
        board_count: args.boards,
        tag_universe: args.tags,
        tag_count_range: (args.tag_count_min, args.tag_count_max),
        t1: args.t1,
        t2: args.t2,
        slot_duration: args.slot_duration,
        gamma: args.gamma,
        seed: args.seed,
        ..GeneratorParams::default()
    };
    let instance = generate_instance(&params)?;
    let mut manifest = Manifest::for_instance(&instance);
    manifest.set("alpha", args.alpha);
    manifest.set("beta", args.beta);
    manifest.set("gamma", args.gamma);
    manifest.set("seed", args.seed);
    save_instance(&instance, &args.out, &manifest)?;
    println!(
        "wrote {} ({} users, {} boards, {} slots, {} advertisers, supply {:.1})",
        args.out.display(),
        instance.user_count(),
        instance.catalog.board_count(),
        instance.slot_count(),
        instance.advertiser_count(),
        instance.catalog.supply(),
    );
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let paths = IngestPaths {
        trajectories: args.trajectories,
        affinities: args.affinities,
        billboards: args.billboards,
        advertisers: args.advertisers,
    };
    let options = IngestOptions {
        t1: args.t1,
        t2: args.t2,
        slot_duration: args.slot_duration,
        gamma: args.gamma,
        seed: args.seed,
    };
    let (instance, summary) = ingest_csv(&paths, &options)?;
    let validation = validate_instance(&instance);
    if !validation.ok() {
        for v in &validation.violations {
            eprintln!("violation: {v}");
        }
        bail!("{} validation violations", validation.violations.len());
    }
    let mut manifest = Manifest::for_instance(&instance);
    manifest.set("gamma", args.gamma);
    manifest.set("seed", args.seed);
    save_instance(&instance, &args.out, &manifest)?;
    println!(
        "wrote {} ({} users, {} slots); dropped {} records, {} users, {} affinities; clamped {}",
        args.out.display(),
        instance.user_count(),
        instance.slot_count(),
        summary.dropped_records,
        summary.dropped_users,
        summary.dropped_affinities,
        summary.clamped_records,
    );
    Ok(())
}

fn load_checked(path: &PathBuf) -> Result<(Instance, Manifest)> {
    let (instance, manifest) =
        load_instance(path).with_context(|| format!("loading {}", path.display()))?;
    let validation = validate_instance(&instance);
    if !validation.ok() {
        for v in &validation.violations {
            eprintln!("violation: {v}");
        }
        bail!("instance fails validation");
    }
    Ok((instance, manifest))
}

fn build_config(
    algorithm: Algorithm,
    flags: &SolveFlags,
    manifest: &Manifest,
    limits: Option<OracleLimits>,
) -> Result<SolverConfig> {
    let mut config = SolverConfig::new(algorithm, flags.seed);
    config.epsilon = flags.epsilon;
    config.rls_iters = flags.rls_iters;
    config.regret = RegretParams::new(flags.delta)?;
    config.tag = TagSelectionParams::new(flags.omega)?;
    config.gamma = flags.gamma.or_else(|| manifest.gamma()).unwrap_or(100.0);
    config.score_context = match flags.score_context {
        ScoreContextArg::Tag => trmoa::solver::ScoreContext::Tag,
        ScoreContextArg::Full => trmoa::solver::ScoreContext::Full,
    };
    config.score_denominator = match flags.score_denominator {
        ScoreDenominatorArg::Cost => trmoa::solver::ScoreDenominator::Cost,
        ScoreDenominatorArg::Influence => trmoa::solver::ScoreDenominator::Influence,
    };
    config.early_stop = flags.early_stop;
    if let Some(limits) = limits {
        config.oracle_limits = limits;
    }
    Ok(config)
}

fn solve_and_report(instance: &Instance, config: &SolverConfig, out: Option<PathBuf>) -> Result<()> {
    let index = build_exposure_index(
        &instance.db.records,
        &instance.catalog,
        instance.user_count(),
        config.gamma,
    );
    let outcome = solve_with_index(instance, config, &index)?;
    let text = serialize_allocation(&outcome.allocation, &outcome.report, instance);
    match out {
        Some(path) => std::fs::write(&path, &text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    eprintln!(
        "{}: total regret {:.6} (excessive {:.6}, unsatisfied {:.6}), {}/{} satisfied, \
         {} slots allocated, {:.1} ms",
        config.algorithm.as_str(),
        outcome.report.total,
        outcome.report.excessive_total,
        outcome.report.unsatisfied_total,
        outcome.report.satisfied_count,
        instance.advertiser_count(),
        outcome.allocation.allocated_count(),
        outcome.trace.wall.as_secs_f64() * 1e3,
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (instance, manifest) = load_checked(&args.instance)?;
    let config = build_config(args.algo.into(), &args.flags, &manifest, None)?;
    solve_and_report(&instance, &config, args.out)
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let (instance, manifest) = load_checked(&args.instance)?;
    let limits = OracleLimits {
        max_slots: args.max_slots,
        max_advertisers: args.max_advertisers,
    };
    let config = build_config(Algorithm::Oracle, &args.flags, &manifest, Some(limits))?;
    solve_and_report(&instance, &config, args.out)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let grid = std::fs::read_to_string(&args.grid)
        .with_context(|| format!("reading {}", args.grid.display()))?;
    let mut spec = parse_grid(&grid)?;
    if let Some(algos) = &args.algos {
        spec.algorithms = algos
            .split(',')
            .map(|p| {
                Algorithm::parse(p.trim())
                    .ok_or_else(|| anyhow::anyhow!("unknown algorithm {p}"))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(seeds) = args.seeds {
        spec.seeds_per_cell = seeds;
    }
    if let Some(master) = args.master_seed {
        spec.master_seed = master;
    }
    let rows = run_sweep_to_dir(&spec, &args.out)?;
    let flagged = rows.iter().filter(|r| !r.is_ok()).count();
    println!(
        "{} rows over {} cells -> {}",
        rows.len(),
        spec.cells().len(),
        args.out.display()
    );
    if flagged > 0 {
        eprintln!("{flagged} rows flagged with solver errors");
        if args.strict {
            std::process::exit(1);
        }
    }
    Ok(())
}

fn cmd_summarize(args: SummarizeArgs) -> Result<()> {
    let results = std::fs::read_to_string(&args.results)
        .with_context(|| format!("reading {}", args.results.display()))?;
    let timings = match &args.timings {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let rows = rows_from_results_csv(&results, timings.as_deref())?;
    let table = render_summary_csv(&summarize(&rows));
    match args.out {
        Some(path) => std::fs::write(&path, table)?,
        None => print!("{table}"),
    }
    Ok(())
}
