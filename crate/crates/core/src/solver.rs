//! Projected descent for saddle-shaped minimizers in `B_R`.

use crate::energy::{total_energy, EnergyBreakdown, Grid, KernelTable, OddProfile, Potential, TableOptions};
use crate::kernels::RadialKernel;
use crate::operator::DiscreteOperator;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the projected gradient is below this fraction of its
    /// initial sup-norm.
    pub grad_tol: f64,
    pub armijo_c1: f64,
    pub max_backtracks: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_iters: 5000, grad_tol: 1e-6, armijo_c1: 1e-4, max_backtracks: 60, seed: 0 }
    }
}

/// A grid together with its kernel table and assembled operator.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid,
    pub kernel: RadialKernel,
    pub table: KernelTable,
    pub operator: DiscreteOperator,
    pub potential: Potential,
}

impl Problem {
    pub fn new(grid: Grid, kernel: RadialKernel, potential: Potential, opts: &TableOptions) -> Result<Self> {
        let table = KernelTable::build(&grid, &kernel, opts)?;
        let operator = DiscreteOperator::assemble(&grid, &table)?;
        Ok(Self { grid, kernel, table, operator, potential })
    }

    /// `w^T W L w + 2 sum G(w) w_x`, the energy on `B_R` without the
    /// constant contribution of the cone cells.
    pub fn energy(&self, values: &[f64]) -> Result<f64> {
        let kin = self.operator.quadratic_form(values)?;
        let pot: f64 = values.iter().zip(&self.operator.weights).map(|(v, w)| self.potential.g(*v) * w).sum();
        Ok(kin + 2.0 * pot)
    }

    pub fn breakdown(&self, profile: &OddProfile, s: f64) -> Result<EnergyBreakdown> {
        total_energy(profile, s, &self.grid, &self.table, self.potential)
    }
}

/// `min{1, mu0 d(x)}` times a cutoff equal to 1 on `[0, R-2]` and
/// decreasing linearly to 0 at `R`.
pub fn initial_guess(grid: &Grid, mu0: f64) -> Result<OddProfile> {
    if !(mu0 > 0.0) {
        return Err(Error::Domain(format!("initial slope must be positive, got {mu0}")));
    }
    let r = grid.r;
    Ok(OddProfile::from_fn(grid, |p| {
        let cut = ((r - p.norm()) / 2.0).clamp(0.0, 1.0);
        (mu0 * p.cone_distance()).min(1.0) * cut
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub profile: OddProfile,
    pub energy: EnergyBreakdown,
    /// Energy after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub initial_gradient: f64,
    pub final_gradient: f64,
}

fn projected_gradient(values: &[f64], g: &[f64]) -> f64 {
    values
        .iter()
        .zip(g)
        .map(|(&v, &d)| if (v <= 0.0 && d > 0.0) || (v >= 1.0 && d < 0.0) { 0.0 } else { d.abs() })
        .fold(0.0, f64::max)
}

/// Jacobi-scaled projected gradient with Barzilai-Borwein steps and Armijo
/// backtracking on the box `[0, 1]`.
pub fn minimize(problem: &Problem, config: &SolverConfig, init: &OddProfile) -> Result<Solution> {
    init.check(&problem.grid)?;
    let opr = &problem.operator;
    let pot = problem.potential;
    let n = opr.len();
    let w = &opr.weights;
    let diag: Vec<f64> = (0..n).map(|x| opr.matrix[(x, x)]).collect();
    let mut u: Vec<f64> = init.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let mut lu = opr.apply(&u)?;
    let mut energy = problem.energy(&u)?;
    // Per-volume gradient; the energy gradient is 2 w_x times this.
    let grad = |u: &[f64], lu: &[f64]| -> Vec<f64> { (0..n).map(|x| lu[x] - pot.f(u[x])).collect() };
    let mut g = grad(&u, &lu);
    let g0 = projected_gradient(&u, &g);
    let mut trace = vec![energy];
    let finish = |u: Vec<f64>, trace: Vec<f64>, it: usize, conv: bool, gf: f64| -> Result<Solution> {
        let profile = OddProfile { values: u };
        let energy = problem.breakdown(&profile, problem.grid.r)?;
        Ok(Solution { profile, energy, trace, iterations: it, converged: conv, initial_gradient: g0, final_gradient: gf })
    };
    if g0 == 0.0 {
        return finish(u, trace, 0, true, 0.0);
    }
    let target = config.grad_tol * g0;
    let mut alpha = 1.0;
    for it in 1..=config.max_iters {
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let d: Vec<f64> = (0..n).map(|x| (u[x] - step * g[x] / diag[x]).clamp(0.0, 1.0) - u[x]).collect();
            let ld = opr.apply(&d)?;
            // E(u + d) - E(u) without cancellation between large totals.
            let mut de = 0.0;
            let mut slope = 0.0;
            for x in 0..n {
                let gu = 2.0 * w[x] * (lu[x] - pot.f(u[x]));
                slope += gu * d[x];
                de += w[x] * d[x] * (2.0 * lu[x] + ld[x]) + 2.0 * w[x] * (pot.g(u[x] + d[x]) - pot.g(u[x]));
            }
            if !de.is_finite() {
                return Err(Error::Aborted(format!("non-finite energy at iteration {it}")));
            }
            let dmax = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if dmax == 0.0 {
                accepted = Some((d, ld, 0.0));
                break;
            }
            if de <= config.armijo_c1 * slope {
                accepted = Some((d, ld, de));
                break;
            }
            step *= 0.5;
        }
        let Some((d, ld, de)) = accepted else {
            let gp = projected_gradient(&u, &g);
            return Err(Error::Aborted(format!(
                "backtracking exhausted at iteration {it}: projected gradient {gp:.3e} (target {target:.3e})"
            )));
        };
        let mut sy = 0.0;
        let mut ss = 0.0;
        for x in 0..n {
            u[x] += d[x];
            lu[x] += ld[x];
        }
        let g_new = grad(&u, &lu);
        for x in 0..n {
            sy += d[x] * 2.0 * w[x] * (g_new[x] - g[x]);
            ss += 2.0 * w[x] * diag[x] * d[x] * d[x];
        }
        energy += de;
        trace.push(energy);
        g = g_new;
        let gp = projected_gradient(&u, &g);
        if !gp.is_finite() {
            return Err(Error::Aborted(format!("non-finite gradient at iteration {it}")));
        }
        if gp <= target {
            return finish(u, trace, it, true, gp);
        }
        alpha = if sy > 0.0 { (ss / sy).clamp(1e-3, 1e3) } else { 1.0 };
    }
    let gp = projected_gradient(&u, &g);
    finish(u, trace, config.max_iters, false, gp)
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    #[serde(rename = "R")]
    pub r: f64,
    pub iterations: usize,
    pub converged: bool,
    pub energy: EnergyBreakdown,
    /// Energies `E(u_R, B_S)` at the requested radii.
    pub ball_energies: Vec<(f64, f64)>,
    /// Sup-difference from the previous stage on `B_compare`.
    pub sup_difference: Option<f64>,
    /// Set when the previous stage differs by more than 0.1 on `B_compare`.
    pub unstable: bool,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub stages: Vec<Stage>,
    pub problem: Problem,
    pub solution: Solution,
}

/// Options for [`continuation`].
#[derive(Debug, Clone)]
pub struct ContinuationOptions {
    pub schedule: Vec<f64>,
    pub h: f64,
    /// `R_out / R`.
    pub buffer: f64,
    pub mu0: f64,
    pub compare_radius: f64,
    pub ball_radii: Vec<f64>,
    pub table: TableOptions,
}

pub const UNSTABLE_DIFFERENCE: f64 = 0.1;

/// Solves on each radius of an increasing schedule, warm-starting from the
/// previous profile on the cells they share.
pub fn continuation(
    kernel: &RadialKernel,
    pot: Potential,
    config: &SolverConfig,
    opts: &ContinuationOptions,
) -> Result<ContinuationResult> {
    if opts.schedule.is_empty() || opts.schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("R schedule must be nonempty and increasing".into()));
    }
    let mut stages: Vec<Stage> = Vec::new();
    let mut last: Option<(Problem, Solution)> = None;
    for &r in &opts.schedule {
        let grid = Grid::new(r, opts.h, kernel.m, opts.buffer * r)?;
        let mut init = initial_guess(&grid, opts.mu0)?;
        if let Some((prev_p, prev_s)) = &last {
            for x in grid.interior() {
                let (i, j) = grid.cells[x];
                if let Some(y) = prev_p.grid.index_of(i, j).filter(|&y| y < prev_p.grid.n_interior) {
                    init.values[x] = prev_s.profile.values[y];
                }
            }
        }
        let problem = Problem::new(grid, kernel.clone(), pot, &opts.table)?;
        let sol = minimize(&problem, config, &init)?;
        let sup_difference = last.as_ref().map(|(pp, ps)| {
            let mut sup: f64 = 0.0;
            for x in problem.grid.interior() {
                if problem.grid.nodes[x].norm() >= opts.compare_radius {
                    continue;
                }
                let (i, j) = problem.grid.cells[x];
                if let Some(y) = pp.grid.index_of(i, j).filter(|&y| y < pp.grid.n_interior) {
                    sup = sup.max((sol.profile.values[x] - ps.profile.values[y]).abs());
                }
            }
            sup
        });
        let ball_energies = opts
            .ball_radii
            .iter()
            .filter(|&&s| s <= r)
            .map(|&s| problem.breakdown(&sol.profile, s).map(|e| (s, e.total)))
            .collect::<Result<Vec<_>>>()?;
        stages.push(Stage {
            r,
            iterations: sol.iterations,
            converged: sol.converged,
            energy: sol.energy,
            ball_energies,
            sup_difference,
            unstable: sup_difference.is_some_and(|d| d > UNSTABLE_DIFFERENCE),
        });
        last = Some((problem, sol));
    }
    let (problem, solution) = last.expect("schedule is nonempty");
    Ok(ContinuationResult { stages, problem, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn problem(pot: Potential) -> Problem {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let grid = Grid::with_default_buffer(4.0, 0.5, 1).unwrap();
        Problem::new(grid, k, pot, &TableOptions::default()).unwrap()
    }

    #[test]
    fn initial_guess_examples() {
        let grid = Grid::with_default_buffer(12.0, 0.25, 1).unwrap();
        let u = initial_guess(&grid, 1.0).unwrap();
        assert!(u.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        let x = grid.index_of(20, 0).unwrap();
        assert_relative_eq!(u.values[x], 1.0);
        let x = grid.index_of(3, 1).unwrap();
        let d = grid.nodes[x].cone_distance();
        assert_relative_eq!(u.values[x], d, max_relative = 1e-14);
        assert!(initial_guess(&grid, 0.0).is_err());
    }

    #[test]
    fn zero_potential_from_zero_is_immediate() {
        let p = problem(Potential::Zero);
        let sol = minimize(&p, &SolverConfig::default(), &OddProfile::zeros(&p.grid)).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.energy.total, 0.0);
    }

    #[test]
    fn energy_matches_breakdown_up_to_cone_cells() {
        let p = problem(Potential::AllenCahn);
        let u = initial_guess(&p.grid, 0.8).unwrap();
        let e = p.energy(&u.values).unwrap();
        let b = p.breakdown(&u, p.grid.r).unwrap();
        let cone: f64 = p.grid.cone_cells.iter().filter(|(q, _)| q.norm() < p.grid.r).map(|(_, w)| w).sum();
        assert_relative_eq!(e + 2.0 * 0.25 * cone, b.total, max_relative = 1e-10);
    }

    #[test]
    fn descent_is_monotone_and_boxed() {
        let p = problem(Potential::AllenCahn);
        let init = initial_guess(&p.grid, 1.0).unwrap();
        let cfg = SolverConfig { max_iters: 300, ..SolverConfig::default() };
        let sol = minimize(&p, &cfg, &init).unwrap();
        assert!(sol.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs()));
        assert!(sol.profile.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        let direct = p.energy(&sol.profile.values).unwrap();
        assert_relative_eq!(direct, *sol.trace.last().unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn single_stage_continuation_equals_minimize() {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let cfg = SolverConfig { max_iters: 50, ..SolverConfig::default() };
        let opts = ContinuationOptions {
            schedule: vec![4.0],
            h: 0.5,
            buffer: 1.5,
            mu0: 1.0,
            compare_radius: 3.0,
            ball_radii: vec![2.0],
            table: TableOptions::default(),
        };
        let c = continuation(&k, Potential::AllenCahn, &cfg, &opts).unwrap();
        let p = problem(Potential::AllenCahn);
        let sol = minimize(&p, &cfg, &initial_guess(&p.grid, 1.0).unwrap()).unwrap();
        assert_eq!(c.solution.profile, sol.profile);
        assert_eq!(c.stages.len(), 1);
        assert!(c.stages[0].sup_difference.is_none());
    }
}
