//! Subcommand drivers. Each writes its artifacts into the output directory
//! and reports whether the checked property held.

use crate::config::RunConfig;
use crate::io;
use crate::plot;
use anyhow::{bail, Context};
use saddle_core::doubly_radial::{verify_kernel_inequality_with, DoublyRadialPoint, PairSampler, QuadratureRule, DEFAULT_ORDER};
use saddle_core::energy::{EnergyBreakdown, Grid, OddProfile, Potential, TableOptions};
use saddle_core::experiments::{build_competitor, energy_scan, measure_mu, CompetitorReport, ScalingReport};
use saddle_core::kernels::{
    check_sqrt_convexity, default_tau_grid, geometric_grid, ConvexityReport, ConvexityVerdict, KernelFamily, RadialKernel,
    CONVEXITY_TOL,
};
use saddle_core::operator::{check_max_principle_structure, default_probes, residual, row_sum_errors, MaxPrincipleReport};
use saddle_core::solver::{continuation, initial_guess, minimize, ContinuationOptions, Problem, SolverConfig, Stage};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Row-sum agreement required by `check-operator`.
pub const ROW_SUM_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KernelCheck,
    VerifyInequality,
    CheckOperator,
    Solve,
    EnergyScan,
    Competitor,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::KernelCheck => "kernel-check",
            Command::VerifyInequality => "verify-inequality",
            Command::CheckOperator => "check-operator",
            Command::Solve => "solve",
            Command::EnergyScan => "energy-scan",
            Command::Competitor => "competitor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    fn from(pass: bool) -> Self {
        if pass {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Profile CSV for `energy-scan` and `competitor`; defaults to
    /// `profile.csv` in the output directory, solving first when absent.
    pub profile: Option<PathBuf>,
    /// Skip the convexity certificate required before solving.
    pub force: bool,
}

pub fn run(cmd: Command, cfg: &RunConfig, opts: &RunOptions) -> anyhow::Result<Outcome> {
    cfg.validate()?;
    let out = cfg.output.dir.clone();
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create output directory {}", out.display()))?;
    match cmd {
        Command::KernelCheck => kernel_check(cfg, &out),
        Command::VerifyInequality => verify_inequality(cfg, &out),
        Command::CheckOperator => check_operator(cfg, &out),
        Command::Solve => solve(cfg, &out, opts).map(|s| s.outcome),
        Command::EnergyScan => scan(cfg, &out, opts),
        Command::Competitor => competitor(cfg, &out, opts),
    }
}

#[derive(Debug, Serialize)]
struct KernelInfo {
    family: String,
    m: usize,
    gamma: f64,
    c_norm: f64,
    lambda: f64,
    #[serde(rename = "Lambda")]
    big_lambda: f64,
}

impl KernelInfo {
    fn of(k: &RadialKernel) -> Self {
        Self {
            family: k.family.name(),
            m: k.m,
            gamma: k.gamma,
            c_norm: k.c_norm,
            lambda: k.lambda,
            big_lambda: k.big_lambda,
        }
    }
}

#[derive(Debug, Serialize)]
struct GridInfo {
    #[serde(rename = "R")]
    r: f64,
    h: f64,
    #[serde(rename = "R_out")]
    r_out: f64,
    m: usize,
    interior_nodes: usize,
    exterior_nodes: usize,
}

impl GridInfo {
    fn of(g: &Grid) -> Self {
        Self {
            r: g.r,
            h: g.h,
            r_out: g.r_out,
            m: g.m,
            interior_nodes: g.n_interior,
            exterior_nodes: g.nodes.len() - g.n_interior,
        }
    }
}

/// `tau` grid and ellipticity radii that stay inside a table's range.
fn sample_ranges(k: &RadialKernel) -> (Vec<f64>, Vec<f64>) {
    match &k.family {
        KernelFamily::Tabulated { r, .. } => {
            let (lo, hi) = (r[0], r[r.len() - 1]);
            (geometric_grid(lo * lo, hi * hi, 512), r.clone())
        }
        _ => (default_tau_grid(), geometric_grid(1e-3, 1e3, 61)),
    }
}

fn convexity(k: &RadialKernel) -> anyhow::Result<ConvexityReport> {
    let (taus, _) = sample_ranges(k);
    Ok(check_sqrt_convexity(k, &taus, CONVEXITY_TOL)?)
}

#[derive(Debug, Serialize)]
struct KernelCheckJson {
    kernel: KernelInfo,
    #[serde(flatten)]
    report: ConvexityReport,
    ellipticity: bool,
}

fn kernel_check(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let k = cfg.kernel()?;
    let report = convexity(&k)?;
    let (_, radii) = sample_ranges(&k);
    let ellipticity = k.ellipticity_holds(&radii)?;
    let pass = report.verdict == ConvexityVerdict::StrictlyConvex;
    io::write_json(&out.join("kernel_check.json"), &KernelCheckJson { kernel: KernelInfo::of(&k), report, ellipticity })?;
    Ok(Outcome::from(pass))
}

#[derive(Debug, Serialize)]
struct PairJson {
    p: DoublyRadialPoint,
    q: DoublyRadialPoint,
}

#[derive(Debug, Serialize)]
struct InequalityJson {
    kernel: KernelInfo,
    sampler: String,
    seed: u64,
    n_samples: usize,
    violations: usize,
    uncertified: usize,
    undetermined: usize,
    unconverged: usize,
    min_gap: Option<f64>,
    min_gap_pair: Option<PairJson>,
}

fn verify_inequality(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let k = cfg.kernel()?;
    let e = &cfg.experiment;
    let sampler = match e.sampler.as_str() {
        "concavity-window" => PairSampler::ConcavityWindow { l1: e.window[0], l2: e.window[1] },
        _ => PairSampler::default(),
    };
    let rule = QuadratureRule::new(k.m, DEFAULT_ORDER)?;
    let rep = verify_kernel_inequality_with(&k, sampler, cfg.solver.seed, e.n_samples, &rule)?;
    let rows: Vec<io::SampleRow> = rep
        .samples
        .iter()
        .map(|(p, q, g)| io::SampleRow { s: p.s, t: p.t, sigma: q.s, tau: q.t, gap: g.is_finite().then_some(*g) })
        .collect();
    io::write_samples(&out.join("inequality_samples.csv"), &rows)?;
    let json = InequalityJson {
        kernel: KernelInfo::of(&k),
        sampler: e.sampler.clone(),
        seed: rep.seed,
        n_samples: rep.n_samples,
        violations: rep.violations,
        uncertified: rep.uncertified,
        undetermined: rep.undetermined,
        unconverged: rep.unconverged,
        min_gap: rep.min_gap.is_finite().then_some(rep.min_gap),
        min_gap_pair: rep.min_gap_pair.map(|(p, q)| PairJson { p, q }),
    };
    io::write_json(&out.join("inequality.json"), &json)?;
    Ok(Outcome::from(rep.violations == 0))
}

#[derive(Debug, Serialize)]
struct OperatorJson {
    kernel: KernelInfo,
    grid: GridInfo,
    #[serde(flatten)]
    report: MaxPrincipleReport,
    row_sum_tolerance: f64,
}

fn check_operator(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let k = cfg.kernel()?;
    let grid = Grid::new(cfg.grid.r, cfg.grid.h, k.m, cfg.r_out())?;
    let topts = TableOptions::default();
    let problem = Problem::new(grid, k, Potential::AllenCahn, &topts)?;
    let mut report = check_max_principle_structure(&problem.operator, cfg.solver.seed, cfg.experiment.probes);
    let errs = row_sum_errors(
        &problem.operator,
        &problem.kernel,
        &problem.grid,
        topts.zero_order_radius_factor * problem.grid.r_out,
    )?;
    let max_err = errs.iter().copied().fold(0.0, f64::max);
    report.max_row_sum_error = Some(max_err);
    let pass = report.z_pattern && report.row_sums_positive && report.monotone_probe && max_err <= ROW_SUM_TOL;
    let json = OperatorJson {
        kernel: KernelInfo::of(&problem.kernel),
        grid: GridInfo::of(&problem.grid),
        report,
        row_sum_tolerance: ROW_SUM_TOL,
    };
    io::write_json(&out.join("operator.json"), &json)?;
    Ok(Outcome::from(pass))
}

fn solver_config(cfg: &RunConfig) -> SolverConfig {
    SolverConfig {
        max_iters: cfg.solver.max_iters,
        grad_tol: cfg.solver.grad_tol,
        seed: cfg.solver.seed,
        ..SolverConfig::default()
    }
}

#[derive(Debug, Serialize)]
struct SolutionJson {
    kernel: KernelInfo,
    grid: GridInfo,
    converged: bool,
    iterations: usize,
    initial_gradient: f64,
    final_gradient: f64,
    monotone_trace: bool,
    residual_sup: Option<f64>,
    residual_limit: f64,
    energy: EnergyBreakdown,
    ball_energies: Vec<BallEnergy>,
    stages: Vec<Stage>,
    trace: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct BallEnergy {
    #[serde(rename = "S")]
    s: f64,
    energy: EnergyBreakdown,
}

struct Solved {
    problem: Problem,
    profile: OddProfile,
    outcome: Outcome,
}

fn certified_kernel(cfg: &RunConfig, force: bool) -> anyhow::Result<RadialKernel> {
    let k = cfg.kernel()?;
    if !force {
        let rep = convexity(&k)?;
        if rep.verdict != ConvexityVerdict::StrictlyConvex {
            bail!(
                "kernel {} is not certified strictly convex in sqrt(tau) (verdict {:?}); pass --force to solve anyway",
                k.family.name(),
                rep.verdict
            );
        }
    }
    Ok(k)
}

fn solve(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> anyhow::Result<Solved> {
    let k = certified_kernel(cfg, opts.force)?;
    let pot = Potential::AllenCahn;
    let config = solver_config(cfg);
    let topts = TableOptions::default();
    let (problem, solution, stages) = match &cfg.solver.r_schedule {
        Some(schedule) if schedule.len() > 1 => {
            let copts = ContinuationOptions {
                schedule: schedule.clone(),
                h: cfg.grid.h,
                buffer: cfg.r_out() / cfg.grid.r,
                mu0: cfg.solver.mu0,
                compare_radius: 0.5 * schedule[0],
                ball_radii: cfg.experiment.s_list.clone(),
                table: topts,
            };
            let res = continuation(&k, pot, &config, &copts)?;
            (res.problem, res.solution, res.stages)
        }
        _ => {
            let grid = Grid::new(cfg.grid.r, cfg.grid.h, k.m, cfg.r_out())?;
            let problem = Problem::new(grid, k, pot, &topts)?;
            let init = initial_guess(&problem.grid, cfg.solver.mu0)?;
            let solution = minimize(&problem, &config, &init)?;
            (problem, solution, Vec::new())
        }
    };
    let probes = default_probes(&problem.grid);
    let residual_sup = if probes.is_empty() {
        None
    } else {
        Some(residual(&problem.operator, &solution.profile, pot, &probes)?.sup)
    };
    let residual_limit = 0.05 * pot.sup_f();
    let monotone_trace = solution.trace.windows(2).all(|w| w[1] <= w[0]);
    let ball_energies = cfg
        .experiment
        .s_list
        .iter()
        .map(|&s| Ok(BallEnergy { s, energy: problem.breakdown(&solution.profile, s)? }))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let pass = solution.converged && monotone_trace && residual_sup.is_none_or(|r| r <= residual_limit);
    io::write_profile(&out.join("profile.csv"), &problem.grid, &solution.profile)?;
    let json = SolutionJson {
        kernel: KernelInfo::of(&problem.kernel),
        grid: GridInfo::of(&problem.grid),
        converged: solution.converged,
        iterations: solution.iterations,
        initial_gradient: solution.initial_gradient,
        final_gradient: solution.final_gradient,
        monotone_trace,
        residual_sup,
        residual_limit,
        energy: solution.energy,
        ball_energies,
        stages,
        trace: solution.trace.clone(),
    };
    io::write_json(&out.join("solution.json"), &json)?;
    if cfg.output.plots {
        let svg = plot::heat_map("saddle profile", &problem.grid, &solution.profile);
        std::fs::write(out.join("profile.svg"), svg)?;
    }
    Ok(Solved { problem, profile: solution.profile, outcome: Outcome::from(pass) })
}

/// A solved problem for the scan and competitor commands: reads the profile
/// when one exists and solves otherwise.
fn load_or_solve(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> anyhow::Result<(Problem, OddProfile)> {
    let path = opts.profile.clone().unwrap_or_else(|| out.join("profile.csv"));
    if path.exists() {
        let k = certified_kernel(cfg, opts.force)?;
        let grid = Grid::new(cfg.grid.r, cfg.grid.h, k.m, cfg.r_out())?;
        let profile = io::read_profile(&path, &grid)?;
        let problem = Problem::new(grid, k, Potential::AllenCahn, &TableOptions::default())?;
        Ok((problem, profile))
    } else if opts.profile.is_some() {
        bail!("profile {} does not exist", path.display())
    } else {
        let solved = solve(cfg, out, opts)?;
        Ok((solved.problem, solved.profile))
    }
}

#[derive(Debug, Serialize)]
struct ScanJson {
    kernel: KernelInfo,
    grid: GridInfo,
    #[serde(flatten)]
    report: ScalingReport,
    /// Slope of the zero profile, `2m`.
    zero_profile_exponent: f64,
}

fn scan(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> anyhow::Result<Outcome> {
    if cfg.experiment.s_list.len() < 3 {
        bail!("experiment.S_list: energy-scan needs at least 3 radii, got {}", cfg.experiment.s_list.len());
    }
    let (problem, profile) = load_or_solve(cfg, out, opts)?;
    let report = energy_scan(
        &profile,
        &cfg.experiment.s_list,
        &problem.grid,
        &problem.table,
        problem.potential,
        problem.kernel.gamma,
    )?;
    io::write_scan(&out.join("scan.csv"), &report.rows)?;
    let zero = 2.0 * problem.kernel.m as f64;
    let pass = report.slope < zero;
    if cfg.output.plots {
        let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.s, r.e_total)).collect();
        let svg = plot::loglog("energy in B_S", "S", "E(u, B_S)", &pts, Some((report.slope, report.intercept)));
        std::fs::write(out.join("scan.svg"), svg)?;
    }
    let json = ScanJson {
        kernel: KernelInfo::of(&problem.kernel),
        grid: GridInfo::of(&problem.grid),
        report,
        zero_profile_exponent: zero,
    };
    io::write_json(&out.join("scan.json"), &json)?;
    Ok(Outcome::from(pass))
}

#[derive(Debug, Serialize)]
struct CompetitorJson {
    kernel: KernelInfo,
    grid: GridInfo,
    mu_source: &'static str,
    all_pass: bool,
    #[serde(flatten)]
    report: CompetitorReport,
}

fn competitor(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> anyhow::Result<Outcome> {
    let s = cfg.experiment.s.context("experiment.S: required for the competitor construction")?;
    let (problem, profile) = load_or_solve(cfg, out, opts)?;
    let (mu, mu_source) = match cfg.experiment.mu {
        Some(mu) => (mu, "config"),
        None => (measure_mu(&problem.grid, &profile, s + 3.0), "measured"),
    };
    let (w, report) = build_competitor(&problem.grid, &problem.table, problem.potential, &profile, s, mu)?;
    io::write_profile(&out.join("competitor_profile.csv"), &problem.grid, &w)?;
    if cfg.output.plots {
        std::fs::write(out.join("competitor.svg"), plot::heat_map("competitor", &problem.grid, &w))?;
    }
    let pass = report.all_pass();
    let json = CompetitorJson {
        kernel: KernelInfo::of(&problem.kernel),
        grid: GridInfo::of(&problem.grid),
        mu_source,
        all_pass: pass,
        report,
    };
    io::write_json(&out.join("competitor.json"), &json)?;
    Ok(Outcome::from(pass))
}
