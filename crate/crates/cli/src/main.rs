use anyhow::Context;
use clap::{Parser, Subcommand};
use saddle_cli::config::{CNorm, RunConfig};
use saddle_cli::io::write_json;
use saddle_cli::run::{run, Command, Outcome, RunOptions};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "saddle", version, about = "Kernel checks, saddle-shaped minimizers and energy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration; defaults apply to anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    m: Option<usize>,
    /// fractional, piecewise-counterexample, exponential or tabulated.
    #[arg(long, global = true)]
    family: Option<String>,
    /// A number or "standard".
    #[arg(long = "c-norm", global = true)]
    c_norm: Option<String>,
    #[arg(long = "R", global = true)]
    r: Option<f64>,
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long = "R-out", global = true)]
    r_out: Option<f64>,
    #[arg(long = "max-iters", global = true)]
    max_iters: Option<usize>,
    #[arg(long = "grad-tol", global = true)]
    grad_tol: Option<f64>,
    /// Comma-separated ball radii.
    #[arg(long = "S-list", global = true, value_delimiter = ',')]
    s_list: Option<Vec<f64>>,
    #[arg(long = "S", global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Profile CSV to analyse instead of `<out>/profile.csv`.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Solve even when the kernel is not certified convex in sqrt(tau).
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Square-root convexity and ellipticity of the kernel.
    KernelCheck,
    /// Sampled positivity of the reflected kernel difference.
    VerifyInequality,
    /// Maximum principle structure and row sums of the discrete operator.
    CheckOperator,
    /// Minimizes the energy among odd doubly radial profiles.
    Solve,
    /// Energy in growing balls and the fitted growth exponent.
    EnergyScan,
    /// Builds the comparison profile and checks its hypotheses.
    Competitor,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::KernelCheck => Command::KernelCheck,
            Cmd::VerifyInequality => Command::VerifyInequality,
            Cmd::CheckOperator => Command::CheckOperator,
            Cmd::Solve => Command::Solve,
            Cmd::EnergyScan => Command::EnergyScan,
            Cmd::Competitor => Command::Competitor,
        }
    }
}

impl Cli {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.out {
            cfg.output.dir = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.solver.seed = v;
        }
        if let Some(v) = self.gamma {
            cfg.kernel.gamma = v;
        }
        if let Some(v) = self.m {
            cfg.kernel.m = v;
        }
        if let Some(v) = &self.family {
            cfg.kernel.family = v.clone();
        }
        if let Some(v) = &self.c_norm {
            cfg.kernel.c_norm = match v.parse::<f64>() {
                Ok(x) => CNorm::Value(x),
                Err(_) => CNorm::Named(v.clone()),
            };
        }
        if let Some(v) = self.r {
            cfg.grid.r = v;
        }
        if let Some(v) = self.h {
            cfg.grid.h = v;
        }
        if let Some(v) = self.r_out {
            cfg.grid.r_out = Some(v);
        }
        if let Some(v) = self.max_iters {
            cfg.solver.max_iters = v;
        }
        if let Some(v) = self.grad_tol {
            cfg.solver.grad_tol = v;
        }
        if let Some(v) = &self.s_list {
            cfg.experiment.s_list = v.clone();
        }
        if let Some(v) = self.s {
            cfg.experiment.s = Some(v);
        }
        if let Some(v) = self.mu {
            cfg.experiment.mu = Some(v);
        }
        if let Some(v) = self.samples {
            cfg.experiment.n_samples = v;
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    command: &'a str,
    error: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SADDLE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cmd = Command::from(cli.command);
    let opts = RunOptions { profile: cli.profile.clone(), force: cli.force };
    let cfg = cli.load();
    let out = cfg
        .as_ref()
        .map(|c| c.output.dir.clone())
        .unwrap_or_else(|_| cli.out.clone().unwrap_or_else(|| PathBuf::from("out")));
    match cfg.and_then(|c| run(cmd, &c, &opts)) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => {
            eprintln!("{}: check failed, see {}", cmd.name(), out.display());
            ExitCode::from(2)
        }
        Err(e) => {
            let msg = format!("{e:#}");
            eprintln!("error: {msg}");
            let written = std::fs::create_dir_all(&out)
                .context("cannot create output directory")
                .and_then(|_| write_json(&out.join("error.json"), &ErrorJson { command: cmd.name(), error: msg }));
            if let Err(w) = written {
                eprintln!("error: {w:#}");
            }
            ExitCode::from(1)
        }
    }
}
