//! Run configuration: TOML sections `[kernel]`, `[grid]`, `[solver]`,
//! `[experiment]` and `[output]`, with cross-field validation.

use anyhow::{bail, Context};
use saddle_core::kernels::RadialKernel;
use saddle_core::special::fractional_laplacian_constant;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNorm {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub family: String,
    pub gamma: f64,
    pub m: usize,
    pub lambda: Option<f64>,
    #[serde(rename = "Lambda")]
    pub big_lambda: Option<f64>,
    pub c_norm: CNorm,
    /// CSV with header `r,k`, for the tabulated family.
    pub table: Option<PathBuf>,
    /// Exponent of the exponential family `exp(-r^power)`.
    pub power: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            family: "fractional".into(),
            gamma: 0.5,
            m: 1,
            lambda: None,
            big_lambda: None,
            c_norm: CNorm::Value(1.0),
            table: None,
            power: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "R")]
    pub r: f64,
    pub h: f64,
    #[serde(rename = "R_out")]
    pub r_out: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { r: 16.0, h: 0.25, r_out: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    #[serde(rename = "R_schedule")]
    pub r_schedule: Option<Vec<f64>>,
    pub mu0: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { max_iters: 5000, grad_tol: 1e-6, seed: 0, r_schedule: None, mu0: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(rename = "S_list")]
    pub s_list: Vec<f64>,
    /// Radius of the competitor construction.
    #[serde(rename = "S")]
    pub s: Option<f64>,
    /// Competitor slope; measured on `B_{S+3}` when absent.
    pub mu: Option<f64>,
    pub n_samples: usize,
    /// `log-uniform` or `concavity-window`.
    pub sampler: String,
    pub window: [f64; 2],
    pub probes: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            s_list: Vec::new(),
            s: None,
            mu: None,
            n_samples: 10_000,
            sampler: "log-uniform".into(),
            window: [0.05, 0.7],
            probes: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), plots: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: KernelSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

const FAMILIES: [&str; 4] = ["fractional", "piecewise-counterexample", "exponential", "tabulated"];
const SAMPLERS: [&str; 2] = ["log-uniform", "concavity-window"];

impl RunConfig {
    /// Reads a TOML file; relative table paths are resolved against its directory.
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))?;
        if let Some(t) = &cfg.kernel.table {
            if t.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.kernel.table = Some(base.join(t));
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Every violated constraint, each prefixed with its field name.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let k = &self.kernel;
        if !FAMILIES.contains(&k.family.as_str()) {
            v.push(format!("kernel.family: unknown family {:?} (expected one of {})", k.family, FAMILIES.join(", ")));
        }
        if !(k.gamma > 0.0 && k.gamma < 1.0) {
            v.push(format!("kernel.gamma: must lie in (0, 1), got {}", k.gamma));
        }
        if k.m < 1 {
            v.push("kernel.m: must be at least 1".into());
        }
        match &k.c_norm {
            CNorm::Value(c) if !(*c > 0.0 && c.is_finite()) => {
                v.push(format!("kernel.c_norm: must be positive, got {c}"));
            }
            CNorm::Named(s) if s != "standard" => {
                v.push(format!("kernel.c_norm: expected a positive number or \"standard\", got {s:?}"));
            }
            _ => {}
        }
        if let (Some(l), Some(u)) = (k.lambda, k.big_lambda) {
            if !(l > 0.0 && l <= u) {
                v.push(format!("kernel.lambda: need 0 < lambda <= Lambda, got lambda = {l}, Lambda = {u}"));
            }
        }
        if k.family == "tabulated" && k.table.is_none() {
            v.push("kernel.table: required for the tabulated family".into());
        }
        if !(k.power > 0.0) {
            v.push(format!("kernel.power: must be positive, got {}", k.power));
        }
        let g = &self.grid;
        if !(g.r > 0.0) {
            v.push(format!("grid.R: must be positive, got {}", g.r));
        }
        if !(g.h > 0.0 && g.h < g.r) {
            v.push(format!("grid.h: must satisfy 0 < h < R, got h = {}, R = {}", g.h, g.r));
        }
        if let Some(ro) = g.r_out {
            if !(ro > g.r) {
                v.push(format!("grid.R_out: must exceed R = {}, got {ro}", g.r));
            }
        }
        let s = &self.solver;
        if s.max_iters == 0 {
            v.push("solver.max_iters: must be positive".into());
        }
        if !(s.grad_tol > 0.0) {
            v.push(format!("solver.grad_tol: must be positive, got {}", s.grad_tol));
        }
        if !(s.mu0 > 0.0) {
            v.push(format!("solver.mu0: must be positive, got {}", s.mu0));
        }
        if let Some(sched) = &s.r_schedule {
            if sched.is_empty() || sched[0] <= 0.0 || sched.windows(2).any(|w| !(w[1] > w[0])) {
                v.push("solver.R_schedule: must be a nonempty increasing list of positive radii".into());
            } else if sched[sched.len() - 1] != g.r {
                v.push(format!("solver.R_schedule: must end at grid.R = {}, ends at {}", g.r, sched[sched.len() - 1]));
            }
            if sched.iter().any(|&r| r <= g.h) {
                v.push("solver.R_schedule: every radius must exceed grid.h".into());
            }
        }
        let e = &self.experiment;
        if e.s_list.windows(2).any(|w| !(w[1] > w[0])) {
            v.push("experiment.S_list: must be strictly increasing".into());
        }
        if e.s_list.iter().any(|&x| x < 2.0) {
            v.push("experiment.S_list: every S must be at least 2".into());
        }
        if let Some(&max) = e.s_list.iter().max_by(|a, b| a.total_cmp(b)) {
            if max > g.r - 4.0 {
                v.push(format!(
                    "experiment.S_list: S = {max} exceeds R - 4 = {} (the estimates need R > S + 4)",
                    g.r - 4.0
                ));
            }
        }
        if let Some(sv) = e.s {
            if sv < 2.0 {
                v.push(format!("experiment.S: must be at least 2, got {sv}"));
            }
            if !(sv + 4.0 < g.r) {
                v.push(format!("experiment.S: need R > S + 4, got S = {sv}, R = {}", g.r));
            }
        }
        if let Some(mu) = e.mu {
            if !(mu > 0.0) {
                v.push(format!("experiment.mu: must be positive, got {mu}"));
            }
        }
        if e.n_samples == 0 {
            v.push("experiment.n_samples: must be positive".into());
        }
        if e.probes == 0 {
            v.push("experiment.probes: must be positive".into());
        }
        if !SAMPLERS.contains(&e.sampler.as_str()) {
            v.push(format!("experiment.sampler: unknown sampler {:?} (expected {})", e.sampler, SAMPLERS.join(" or ")));
        }
        if !(e.window[0] > 0.0 && e.window[1] > e.window[0]) {
            v.push(format!("experiment.window: need 0 < l1 < l2, got {:?}", e.window));
        }
        v
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            bail!("invalid configuration:\n  {}", v.join("\n  "))
        }
    }

    pub fn c_norm(&self) -> f64 {
        match &self.kernel.c_norm {
            CNorm::Value(c) => *c,
            CNorm::Named(_) => fractional_laplacian_constant(2 * self.kernel.m, self.kernel.gamma),
        }
    }

    pub fn r_out(&self) -> f64 {
        self.grid.r_out.unwrap_or(1.5 * self.grid.r)
    }

    pub fn kernel(&self) -> anyhow::Result<RadialKernel> {
        let k = &self.kernel;
        let c = self.c_norm();
        let mut kernel = match k.family.as_str() {
            "fractional" => RadialKernel::fractional(k.m, k.gamma, c)?,
            "piecewise-counterexample" => {
                let mut kc = RadialKernel::counterexample(k.m, k.gamma)?;
                kc.c_norm = c;
                kc
            }
            "exponential" => {
                let mut ke = RadialKernel::exponential(k.m, k.power)?;
                ke.c_norm = c;
                ke
            }
            "tabulated" => {
                let path = k.table.as_ref().context("kernel.table: required for the tabulated family")?;
                let (r, kv) = crate::io::read_kernel_table(path)?;
                RadialKernel::tabulated(k.m, k.gamma, c, r, kv)?
            }
            other => bail!("kernel.family: unknown family {other:?}"),
        };
        if let Some(l) = k.lambda {
            kernel.lambda = l;
        }
        if let Some(u) = k.big_lambda {
            kernel.big_lambda = u;
        }
        Ok(kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_is_accepted() {
        let cfg = RunConfig::from_toml("[kernel]\ngamma = 0.5\nm = 1\n[grid]\nR = 16.0\nh = 0.25\n").unwrap();
        assert!(cfg.violations().is_empty());
        assert_eq!(cfg.r_out(), 24.0);
    }

    #[test]
    fn gamma_out_of_range_is_named() {
        let cfg = RunConfig::from_toml("[kernel]\ngamma = 1.2\n").unwrap();
        let v = cfg.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("kernel.gamma"));
    }

    #[test]
    fn scan_radius_too_close_to_the_boundary() {
        let cfg = RunConfig::from_toml("[grid]\nR = 16.0\n[experiment]\nS_list = [4.0, 8.0, 14.0]\n").unwrap();
        let v = cfg.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("experiment.S_list") && v[0].contains("R > S + 4"));
    }

    #[test]
    fn all_violations_are_reported() {
        let cfg = RunConfig::from_toml(
            "[kernel]\ngamma = 0.0\nc_norm = \"other\"\n[grid]\nR = 1.0\nh = 2.0\n[experiment]\nsampler = \"x\"\n",
        )
        .unwrap();
        let v = cfg.violations();
        for field in ["kernel.gamma", "kernel.c_norm", "grid.h", "experiment.sampler"] {
            assert!(v.iter().any(|m| m.starts_with(field)), "{field} missing from {v:?}");
        }
    }

    #[test]
    fn standard_constant() {
        let cfg = RunConfig::from_toml("[kernel]\nc_norm = \"standard\"\n").unwrap();
        assert!(cfg.violations().is_empty());
        assert!((cfg.c_norm() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-14);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[grid]\nradius = 3.0\n").is_err());
    }
}
