//! Parameter-grid experiment harness.
//!
//! A sweep takes the cartesian product of the requested `alpha`, `beta`,
//! `delta`, `gamma`, `epsilon` and `omega` values, runs every algorithm with
//! `seeds_per_cell` repetitions per cell, and emits plot-ready CSV. Results
//! are a pure function of the spec: instance and solver seeds derive from
//! the master seed and the cell parameters (never from scheduling), cells
//! run in parallel, and rows are written in canonical (cell, algorithm,
//! repetition) order. Wall-clock timings go to a separate `timings.csv` so
//! `results.csv` stays byte-identical across reruns.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::gen::{generate_instance, GenError, GeneratorParams};
use crate::influence::build_exposure_index;
use crate::io::{serialize_allocation, IoError};
use crate::model::Instance;
use crate::regret::RegretParams;
use crate::solver::{derive_seed, solve_with_index, Algorithm, SolverConfig};
use crate::tags::TagSelectionParams;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("empty sweep: {0}")]
    EmptySpec(String),
    #[error("fixed-instance sweeps cannot vary {0}")]
    FixedInstanceGrid(String),
    #[error(transparent)]
    File(#[from] std::io::Error),
}

/// Where sweep instances come from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    /// Generate one instance per (cell, repetition); the cell's alpha, beta
    /// and gamma override the template's.
    Generated(GeneratorParams),
    /// One fixed instance for every cell; only delta/gamma/epsilon/omega may
    /// form a grid.
    Fixed(Box<Instance>),
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub omegas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub seeds_per_cell: u32,
    pub master_seed: u64,
    pub source: InstanceSource,
    pub rls_iters: u32,
}

impl SweepSpec {
    /// Single-cell spec at the paper's default parameters.
    pub fn single_cell(source: InstanceSource, algorithms: Vec<Algorithm>) -> Self {
        SweepSpec {
            alphas: vec![1.0],
            betas: vec![0.05],
            deltas: vec![0.5],
            gammas: vec![100.0],
            epsilons: vec![0.01],
            omegas: vec![0.01],
            algorithms,
            seeds_per_cell: 1,
            master_seed: 0,
            source,
            rls_iters: 20,
        }
    }

    fn check(&self) -> Result<(), SweepError> {
        for (name, values) in [
            ("alpha", &self.alphas),
            ("beta", &self.betas),
            ("delta", &self.deltas),
            ("gamma", &self.gammas),
            ("epsilon", &self.epsilons),
            ("omega", &self.omegas),
        ] {
            if values.is_empty() {
                return Err(SweepError::EmptySpec(format!("no {name} values")));
            }
        }
        if self.algorithms.is_empty() {
            return Err(SweepError::EmptySpec("no algorithms".into()));
        }
        if self.seeds_per_cell == 0 {
            return Err(SweepError::EmptySpec("seeds_per_cell must be >= 1".into()));
        }
        if let InstanceSource::Fixed(_) = self.source {
            if self.alphas.len() > 1 || self.betas.len() > 1 {
                return Err(SweepError::FixedInstanceGrid("alpha or beta".into()));
            }
        }
        Ok(())
    }

    /// Cells in canonical nesting order (alpha outermost, omega innermost).
    pub fn cells(&self) -> Vec<CellParams> {
        let mut out = Vec::new();
        for &alpha in &self.alphas {
            for &beta in &self.betas {
                for &delta in &self.deltas {
                    for &gamma in &self.gammas {
                        for &epsilon in &self.epsilons {
                            for &omega in &self.omegas {
                                out.push(CellParams {
                                    index: out.len(),
                                    alpha,
                                    beta,
                                    delta,
                                    gamma,
                                    epsilon,
                                    omega,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams {
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub omega: f64,
}

impl CellParams {
    /// Instance seed: shared by every cell that uses the same instance
    /// (delta, epsilon and omega do not shape the instance).
    fn instance_seed(&self, master: u64, rep: u32) -> u64 {
        derive_seed(
            master,
            &[
                0x696e7374, // "inst"
                self.alpha.to_bits(),
                self.beta.to_bits(),
                self.gamma.to_bits(),
                rep as u64,
            ],
        )
    }

    /// Solver seed. Deliberately independent of `delta`: the penalty ratio
    /// shapes scoring, not sampling, so solvers whose decisions ignore it
    /// (the random baseline) see identical draws across a delta sweep.
    fn solve_seed(&self, master: u64, rep: u32) -> u64 {
        derive_seed(
            master,
            &[
                0x736f6c76, // "solv"
                self.alpha.to_bits(),
                self.beta.to_bits(),
                self.gamma.to_bits(),
                self.epsilon.to_bits(),
                self.omega.to_bits(),
                rep as u64,
            ],
        )
    }
}

/// One (cell, algorithm, repetition) result.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: CellParams,
    pub algorithm: Algorithm,
    pub rep: u32,
    pub solve_seed: u64,
    pub total_regret: f64,
    pub excessive_regret: f64,
    pub unsatisfied_regret: f64,
    pub satisfied: usize,
    pub wall_ms: f64,
    /// "ok", or the solver error message.
    pub status: String,
    /// Canonical allocation text, for trace emission and determinism checks.
    pub allocation_text: String,
    /// Per-selection trace rows rendered as CSV.
    pub trace_csv: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn solver_config(cell: &CellParams, algorithm: Algorithm, seed: u64, rls_iters: u32) -> SolverConfig {
    let mut config = SolverConfig::new(algorithm, seed);
    config.epsilon = cell.epsilon;
    config.gamma = cell.gamma;
    config.rls_iters = rls_iters;
    config.regret = RegretParams { delta: cell.delta };
    config.tag = TagSelectionParams { omega: cell.omega };
    config
}

fn trace_csv(outcome: &crate::solver::SolveOutcome, instance: &Instance) -> String {
    let mut out = String::from("advertiser,tag_pointer,tag,slot,score,remaining_demand\n");
    for e in &outcome.trace.entries {
        let score = e.score.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            instance.book.labels[e.advertiser.index()],
            e.tag_pointer,
            instance.db.tag_labels[e.tag.index()],
            instance.catalog.slot_labels[e.slot.index()],
            score,
            e.remaining_demand,
        ));
    }
    out
}

/// Runs every (cell, repetition, algorithm) combination. Cells and
/// repetitions fan out over the rayon pool; the returned rows are in
/// canonical order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.check()?;
    let cells = spec.cells();
    let jobs: Vec<(CellParams, u32)> = cells
        .iter()
        .flat_map(|&cell| (0..spec.seeds_per_cell).map(move |rep| (cell, rep)))
        .collect();

    let mut rows: Vec<Vec<SweepRow>> = jobs
        .par_iter()
        .map(|&(cell, rep)| run_job(spec, cell, rep))
        .collect::<Result<_, _>>()?;

    let mut flat: Vec<SweepRow> = rows.drain(..).flatten().collect();
    flat.sort_by_key(|r| {
        let algo_pos = spec
            .algorithms
            .iter()
            .position(|&a| a == r.algorithm)
            .unwrap_or(usize::MAX);
        (r.cell.index, algo_pos, r.rep)
    });
    Ok(flat)
}

fn run_job(spec: &SweepSpec, cell: CellParams, rep: u32) -> Result<Vec<SweepRow>, SweepError> {
    let instance: Instance = match &spec.source {
        InstanceSource::Fixed(instance) => (**instance).clone(),
        InstanceSource::Generated(template) => {
            let mut params = template.clone();
            params.alpha = cell.alpha;
            params.beta = cell.beta;
            params.gamma = cell.gamma;
            params.seed = cell.instance_seed(spec.master_seed, rep);
            generate_instance(&params)?
        }
    };
    let index = build_exposure_index(
        &instance.db.records,
        &instance.catalog,
        instance.user_count(),
        cell.gamma,
    );
    let solve_seed = cell.solve_seed(spec.master_seed, rep);

    let mut out = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let config = solver_config(&cell, algorithm, solve_seed, spec.rls_iters);
        let row = match solve_with_index(&instance, &config, &index) {
            Ok(outcome) => SweepRow {
                cell,
                algorithm,
                rep,
                solve_seed,
                total_regret: outcome.report.total,
                excessive_regret: outcome.report.excessive_total,
                unsatisfied_regret: outcome.report.unsatisfied_total,
                satisfied: outcome.report.satisfied_count,
                wall_ms: outcome.trace.wall.as_secs_f64() * 1e3,
                status: "ok".into(),
                allocation_text: serialize_allocation(
                    &outcome.allocation,
                    &outcome.report,
                    &instance,
                ),
                trace_csv: trace_csv(&outcome, &instance),
            },
            Err(e) => SweepRow {
                cell,
                algorithm,
                rep,
                solve_seed,
                total_regret: f64::NAN,
                excessive_regret: f64::NAN,
                unsatisfied_regret: f64::NAN,
                satisfied: 0,
                wall_ms: 0.0,
                status: format!("error: {e}"),
                allocation_text: String::new(),
                trace_csv: String::new(),
            },
        };
        out.push(row);
    }
    Ok(out)
}

pub const RESULTS_HEADER: &str = "alpha,beta,delta,gamma,epsilon,omega,algorithm,rep,seed,\
total_regret,excessive_regret,unsatisfied_regret,satisfied,status";

/// Renders the deterministic results table (no wall-clock columns).
pub fn render_results_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.cell.alpha,
            r.cell.beta,
            r.cell.delta,
            r.cell.gamma,
            r.cell.epsilon,
            r.cell.omega,
            r.algorithm.as_str(),
            r.rep,
            r.solve_seed,
            r.total_regret,
            r.excessive_regret,
            r.unsatisfied_regret,
            r.satisfied,
            r.status,
        ));
    }
    out
}

/// Renders wall-clock timings, keyed like the results table.
pub fn render_timings_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "alpha,beta,delta,gamma,epsilon,omega,algorithm,rep,wall_ms\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.cell.alpha,
            r.cell.beta,
            r.cell.delta,
            r.cell.gamma,
            r.cell.epsilon,
            r.cell.omega,
            r.algorithm.as_str(),
            r.rep,
            r.wall_ms,
        ));
    }
    out
}

/// Runs the sweep and writes `results.csv`, `timings.csv` and per-run
/// `trace/` files under `dir`.
pub fn run_sweep_to_dir(spec: &SweepSpec, dir: &Path) -> Result<Vec<SweepRow>, SweepError> {
    let rows = run_sweep(spec)?;
    std::fs::create_dir_all(dir.join("trace"))?;
    std::fs::write(dir.join("results.csv"), render_results_csv(&rows))?;
    std::fs::write(dir.join("timings.csv"), render_timings_csv(&rows))?;
    for r in &rows {
        if !r.is_ok() {
            continue;
        }
        let name = format!("cell{}-{}-rep{}.csv", r.cell.index, r.algorithm.as_str(), r.rep);
        std::fs::write(dir.join("trace").join(name), &r.trace_csv)?;
    }
    Ok(rows)
}

/// Reads rows back from a `results.csv`, optionally merging wall-clock
/// times from the matching `timings.csv`. Cell indices are reassigned in
/// order of first appearance; traces and allocation text are not recovered.
pub fn rows_from_results_csv(
    results: &str,
    timings: Option<&str>,
) -> Result<Vec<SweepRow>, SweepError> {
    let bad = |line: usize, msg: String| {
        SweepError::EmptySpec(format!("results.csv line {}: {msg}", line + 1))
    };
    let mut lines = results.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        other => {
            return Err(SweepError::EmptySpec(format!(
                "unexpected results.csv header: {other:?}"
            )))
        }
    }

    let mut wall: std::collections::HashMap<String, f64> = std::collections::HashMap::new();
    if let Some(timings) = timings {
        for line in timings.lines().skip(1) {
            if let Some((key, ms)) = line.rsplit_once(',') {
                if let Ok(ms) = ms.parse() {
                    wall.insert(key.to_string(), ms);
                }
            }
        }
    }

    let mut cells: Vec<(String, CellParams)> = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(14, ',').collect();
        if parts.len() != 14 {
            return Err(bad(i, format!("expected 14 fields, got {}", parts.len())));
        }
        let f = |j: usize| -> Result<f64, SweepError> {
            parts[j].parse().map_err(|e| bad(i, format!("field {j}: {e}")))
        };
        let cell_key = parts[..6].join(",");
        let cell = match cells.iter().find(|(k, _)| *k == cell_key) {
            Some((_, cell)) => *cell,
            None => {
                let cell = CellParams {
                    index: cells.len(),
                    alpha: f(0)?,
                    beta: f(1)?,
                    delta: f(2)?,
                    gamma: f(3)?,
                    epsilon: f(4)?,
                    omega: f(5)?,
                };
                cells.push((cell_key.clone(), cell));
                cell
            }
        };
        let algorithm = Algorithm::parse(parts[6])
            .ok_or_else(|| bad(i, format!("unknown algorithm {}", parts[6])))?;
        let rep: u32 = parts[7].parse().map_err(|e| bad(i, format!("rep: {e}")))?;
        let timing_key = format!("{cell_key},{},{rep}", parts[6]);
        rows.push(SweepRow {
            cell,
            algorithm,
            rep,
            solve_seed: parts[8].parse().map_err(|e| bad(i, format!("seed: {e}")))?,
            total_regret: f(9)?,
            excessive_regret: f(10)?,
            unsatisfied_regret: f(11)?,
            satisfied: parts[12]
                .parse()
                .map_err(|e| bad(i, format!("satisfied: {e}")))?,
            wall_ms: wall.get(&timing_key).copied().unwrap_or(f64::NAN),
            status: parts[13].to_string(),
            allocation_text: String::new(),
            trace_csv: String::new(),
        });
    }
    Ok(rows)
}

/// Aggregates over repetitions: one row per (cell, algorithm).
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub cell: CellParams,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_total: f64,
    pub median_total: f64,
    pub stddev_total: f64,
    pub mean_excessive: f64,
    pub mean_unsatisfied: f64,
    pub mean_satisfied: f64,
    pub mean_wall_ms: f64,
    /// Mean total is no worse than the random baseline's in the same cell
    /// (`None` when the sweep did not run the baseline).
    pub beats_random: Option<bool>,
}

/// Per-(cell, algorithm) means, medians and deviations plus the
/// beats-the-baseline ordering flag.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<(usize, Algorithm, Vec<&SweepRow>)> = Vec::new();
    for row in rows.iter().filter(|r| r.is_ok()) {
        match groups
            .iter_mut()
            .find(|(c, a, _)| *c == row.cell.index && *a == row.algorithm)
        {
            Some((_, _, members)) => members.push(row),
            None => groups.push((row.cell.index, row.algorithm, vec![row])),
        }
    }

    let mut out: Vec<SummaryRow> = groups
        .iter()
        .map(|(_, algorithm, members)| {
            let totals: Vec<f64> = members.iter().map(|r| r.total_regret).collect();
            let n = totals.len() as f64;
            let mean = totals.iter().sum::<f64>() / n;
            let mut sorted = totals.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if sorted.len() % 2 == 1 {
                sorted[sorted.len() / 2]
            } else {
                (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
            };
            let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
            SummaryRow {
                cell: members[0].cell,
                algorithm: *algorithm,
                runs: members.len(),
                mean_total: mean,
                median_total: median,
                stddev_total: var.sqrt(),
                mean_excessive: members.iter().map(|r| r.excessive_regret).sum::<f64>() / n,
                mean_unsatisfied: members.iter().map(|r| r.unsatisfied_regret).sum::<f64>() / n,
                mean_satisfied: members.iter().map(|r| r.satisfied as f64).sum::<f64>() / n,
                mean_wall_ms: members.iter().map(|r| r.wall_ms).sum::<f64>() / n,
                beats_random: None,
            }
        })
        .collect();

    let randoms: Vec<(usize, f64)> = out
        .iter()
        .filter(|s| s.algorithm == Algorithm::Random)
        .map(|s| (s.cell.index, s.mean_total))
        .collect();
    for s in &mut out {
        if let Some(&(_, random_mean)) = randoms.iter().find(|(c, _)| *c == s.cell.index) {
            s.beats_random = Some(s.mean_total <= random_mean);
        }
    }
    out
}

pub fn render_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "alpha,beta,delta,gamma,epsilon,omega,algorithm,runs,mean_total,median_total,\
         stddev_total,mean_excessive,mean_unsatisfied,mean_satisfied,mean_wall_ms,beats_random\n",
    );
    for s in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.cell.alpha,
            s.cell.beta,
            s.cell.delta,
            s.cell.gamma,
            s.cell.epsilon,
            s.cell.omega,
            s.algorithm.as_str(),
            s.runs,
            s.mean_total,
            s.median_total,
            s.stddev_total,
            s.mean_excessive,
            s.mean_unsatisfied,
            s.mean_satisfied,
            s.mean_wall_ms,
            s.beats_random.map(|b| b.to_string()).unwrap_or_default(),
        ));
    }
    out
}

/// Parses the flat `key=value` grid file for the `sweep` subcommand:
/// comma-separated value lists for `alpha,beta,delta,gamma,epsilon,omega`,
/// plus `algos`, `seeds`, `master_seed`, `rls_iters` and generator shape
/// keys (`users`, `boards`, `tags`, `t1`, `t2`, `slot_duration`,
/// `tag_count_min`, `tag_count_max`).
pub fn parse_grid(text: &str) -> Result<SweepSpec, SweepError> {
    let bad = |msg: String| SweepError::EmptySpec(msg);
    let mut template = GeneratorParams::default();
    let mut spec = SweepSpec {
        alphas: vec![1.0],
        betas: vec![0.05],
        deltas: vec![0.5],
        gammas: vec![100.0],
        epsilons: vec![0.01],
        omegas: vec![0.01],
        algorithms: vec![
            Algorithm::Bg,
            Algorithm::Rg,
            Algorithm::Rls,
            Algorithm::Random,
        ],
        seeds_per_cell: 10,
        master_seed: 0,
        source: InstanceSource::Generated(GeneratorParams::default()),
        rls_iters: 20,
    };
    let parse_list = |v: &str| -> Result<Vec<f64>, SweepError> {
        v.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(format!("{p}: {e}"))))
            .collect()
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("grid line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "alpha" => spec.alphas = parse_list(v)?,
            "beta" => spec.betas = parse_list(v)?,
            "delta" => spec.deltas = parse_list(v)?,
            "gamma" => spec.gammas = parse_list(v)?,
            "epsilon" => spec.epsilons = parse_list(v)?,
            "omega" => spec.omegas = parse_list(v)?,
            "algos" => {
                spec.algorithms = v
                    .split(',')
                    .map(|p| {
                        Algorithm::parse(p.trim())
                            .ok_or_else(|| bad(format!("unknown algorithm {p}")))
                    })
                    .collect::<Result<_, _>>()?
            }
            "seeds" => spec.seeds_per_cell = v.parse().map_err(|e| bad(format!("seeds: {e}")))?,
            "master_seed" => {
                spec.master_seed = v.parse().map_err(|e| bad(format!("master_seed: {e}")))?
            }
            "rls_iters" => {
                spec.rls_iters = v.parse().map_err(|e| bad(format!("rls_iters: {e}")))?
            }
            "users" => template.user_count = v.parse().map_err(|e| bad(format!("users: {e}")))?,
            "boards" => {
                template.board_count = v.parse().map_err(|e| bad(format!("boards: {e}")))?
            }
            "tags" => template.tag_universe = v.parse().map_err(|e| bad(format!("tags: {e}")))?,
            "t1" => template.t1 = v.parse().map_err(|e| bad(format!("t1: {e}")))?,
            "t2" => template.t2 = v.parse().map_err(|e| bad(format!("t2: {e}")))?,
            "slot_duration" => {
                template.slot_duration =
                    v.parse().map_err(|e| bad(format!("slot_duration: {e}")))?
            }
            "tag_count_min" => {
                template.tag_count_range.0 =
                    v.parse().map_err(|e| bad(format!("tag_count_min: {e}")))?
            }
            "tag_count_max" => {
                template.tag_count_range.1 =
                    v.parse().map_err(|e| bad(format!("tag_count_max: {e}")))?
            }
            other => return Err(bad(format!("unknown grid key {other}"))),
        }
    }
    spec.source = InstanceSource::Generated(template);
    spec.check()?;
    Ok(spec)
}
