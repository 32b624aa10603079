//! The assembled odd operator on interior nodes and its maximum-principle
//! diagnostics.
//!
//! With `W = diag(w_x)` the kinetic energy on `B_R` is `w^T W L w`, so the
//! energy gradient is `2 W (L w - f(w))` and `L u = f(u)` is the discrete
//! Euler-Lagrange equation.

use crate::doubly_radial::{zero_order_by_rays, zero_order_coefficient, QuadratureRule, ZeroOrderOptions};
use crate::energy::{local_edges, Grid, KernelTable, OddProfile, Potential};
use crate::kernels::RadialKernel;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: DMatrix<f64>,
    pub weights: Vec<f64>,
    /// Twice the zero-order coefficient per node.
    pub zero_order: Vec<f64>,
    /// Coupling to zero-valued cells: exterior nodes, the far field and
    /// local edges ending on the cone or outside `B_R`.
    pub ext_coupling: Vec<f64>,
}

impl DiscreteOperator {
    pub fn assemble(grid: &Grid, table: &KernelTable) -> Result<Self> {
        let n = grid.n_interior;
        if table.n != n {
            return Err(Error::Dimension { expected: n, got: table.n });
        }
        let w = &grid.weights[..n];
        let rows: Vec<(Vec<f64>, f64)> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut row = vec![0.0; n];
                let mut diag = 0.0;
                for y in 0..n {
                    if y != x {
                        let c = table.diff_at(x, y) * w[y];
                        row[y] = -c;
                        diag += c;
                    }
                }
                diag += table.ext_diff[x] + 2.0 * table.zero_order[x];
                row[x] = diag;
                (row, table.ext_diff[x])
            })
            .collect();
        let mut matrix = DMatrix::<f64>::zeros(n, n);
        let mut ext_coupling = Vec::with_capacity(n);
        for (x, (row, ext)) in rows.into_iter().enumerate() {
            for (y, v) in row.into_iter().enumerate() {
                matrix[(x, y)] = v;
            }
            ext_coupling.push(ext);
        }
        for e in local_edges(grid, table) {
            let a = e.a;
            matrix[(a, a)] += e.weight / w[a];
            match e.b {
                Some(b) => {
                    matrix[(b, b)] += e.weight / w[b];
                    matrix[(a, b)] -= e.weight / w[a];
                    matrix[(b, a)] -= e.weight / w[b];
                }
                None => ext_coupling[a] += e.weight / w[a],
            }
        }
        Ok(Self {
            matrix,
            weights: w.to_vec(),
            zero_order: table.zero_order.iter().map(|z| 2.0 * z).collect(),
            ext_coupling,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.len() {
            return Err(Error::Dimension { expected: self.len(), got: values.len() });
        }
        let v = DVector::from_column_slice(values);
        Ok((&self.matrix * v).as_slice().to_vec())
    }

    pub fn apply_profile(&self, profile: &OddProfile) -> Result<Vec<f64>> {
        self.apply(&profile.values)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.row_iter().map(|r| r.sum()).collect()
    }

    /// `w^T W L w`.
    pub fn quadratic_form(&self, values: &[f64]) -> Result<f64> {
        let lw = self.apply(values)?;
        Ok(values.iter().zip(&lw).zip(&self.weights).map(|((v, l), w)| v * l * w).sum())
    }

    /// Solves `(L + diag(c)) u = g` by LU factorisation.
    pub fn solve(&self, c: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if c.len() != n || g.len() != n {
            return Err(Error::Dimension { expected: n, got: c.len().min(g.len()) });
        }
        let mut a = self.matrix.clone();
        for (i, ci) in c.iter().enumerate() {
            a[(i, i)] += ci;
        }
        a.lu()
            .solve(&DVector::from_column_slice(g))
            .map(|u| u.as_slice().to_vec())
            .ok_or_else(|| Error::Singular("operator plus reaction term is singular".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub z_pattern: bool,
    pub row_sums_positive: bool,
    pub monotone_probe: bool,
    /// Smallest off-diagonal coupling `-L_xy`; nonnegative exactly when the
    /// sign pattern holds.
    pub min_offdiag: f64,
    /// Largest relative gap between `row sum - exterior coupling` and twice
    /// an independent zero-order integral, when one was supplied.
    pub max_row_sum_error: Option<f64>,
    pub probes_passed: usize,
    pub probes: usize,
    pub min_probe_value: f64,
    /// Probe solves that failed to factorise.
    pub singular_probes: usize,
}

pub const PROBE_TOL: f64 = 1e-10;

/// Sign pattern, row sums and `trials` random solves of
/// `(L + diag(c)) u = g` with `c, g >= 0`.
pub fn check_max_principle_structure(opr: &DiscreteOperator, seed: u64, trials: usize) -> MaxPrincipleReport {
    let n = opr.len();
    let mut min_offdiag = f64::INFINITY;
    for x in 0..n {
        for y in 0..n {
            if x != y {
                min_offdiag = min_offdiag.min(-opr.matrix[(x, y)]);
            }
        }
    }
    let row_sums_positive = opr.row_sums().iter().all(|&r| r > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut singular = 0;
    let mut min_val = f64::INFINITY;
    for _ in 0..trials {
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        match opr.solve(&c, &g) {
            Ok(u) => {
                let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
                min_val = min_val.min(lo);
                if lo >= -PROBE_TOL {
                    passed += 1;
                }
            }
            Err(_) => singular += 1,
        }
    }
    MaxPrincipleReport {
        z_pattern: min_offdiag >= 0.0,
        row_sums_positive,
        monotone_probe: passed == trials,
        min_offdiag: if n > 1 { min_offdiag } else { 0.0 },
        max_row_sum_error: None,
        probes_passed: passed,
        probes: trials,
        min_probe_value: min_val,
        singular_probes: singular,
    }
}

/// Zero-order coefficient from the route not used to build tables: rays for
/// `m = 1` fractional kernels, otherwise the cone-adapted integral with a
/// doubled radius and a tighter tolerance.
pub fn reference_zero_order(k: &RadialKernel, grid: &Grid, x: usize, table_radius: f64) -> Result<f64> {
    let p = &grid.nodes[x];
    if k.m == 1 && k.is_fractional() {
        zero_order_by_rays(k, p, 1e-10)
    } else {
        let rule = QuadratureRule::new(k.m, 64)?;
        zero_order_coefficient(k, p, &ZeroOrderOptions { r_out: 2.0 * table_radius, rel_tol: 1e-9 }, &rule)
    }
}

/// Relative gaps between `row sum - exterior coupling` and twice the
/// reference zero-order coefficient.
pub fn row_sum_errors(opr: &DiscreteOperator, k: &RadialKernel, grid: &Grid, table_radius: f64) -> Result<Vec<f64>> {
    let sums = opr.row_sums();
    (0..opr.len())
        .into_par_iter()
        .map(|x| {
            let reference = 2.0 * reference_zero_order(k, grid, x, table_radius)?;
            Ok(((sums[x] - opr.ext_coupling[x]) - reference).abs() / reference)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub sup: f64,
    pub values: Vec<(usize, f64)>,
}

/// Default probe set: nodes at least `2h` from the cone and from `∂B_R`.
pub fn default_probes(grid: &Grid) -> Vec<usize> {
    grid.interior()
        .filter(|&x| {
            let p = &grid.nodes[x];
            p.cone_distance() >= 2.0 * grid.h && p.norm() <= grid.r - 2.0 * grid.h
        })
        .collect()
}

/// `L u - f(u)` on the probe set.
pub fn residual(opr: &DiscreteOperator, profile: &OddProfile, pot: Potential, probes: &[usize]) -> Result<ResidualReport> {
    if probes.is_empty() {
        return Err(Error::Domain("empty probe set".into()));
    }
    let lu = opr.apply_profile(profile)?;
    let values: Vec<(usize, f64)> = probes.iter().map(|&x| (x, lu[x] - pot.f(profile.values[x]))).collect();
    let sup = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    Ok(ResidualReport { sup, values })
}

/// Lower bound `delta` on `-(L u)(x0)` when `u >= 0`, `u(x0) = 0`:
/// smallest off-diagonal coupling per unit weight, times `max u` and the
/// smallest cell weight.
pub fn strong_principle_margin(opr: &DiscreteOperator, values: &[f64]) -> f64 {
    let n = opr.len();
    let mut min_coupling = f64::INFINITY;
    for x in 0..n {
        for y in 0..n {
            let c = -opr.matrix[(x, y)] / opr.weights[y];
            if x != y && c > 0.0 {
                min_coupling = min_coupling.min(c);
            }
        }
    }
    let umax = values.iter().copied().fold(0.0, f64::max);
    let wmin = opr.weights.iter().copied().fold(f64::INFINITY, f64::min);
    min_coupling * umax * wmin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::TableOptions;
    use approx::assert_relative_eq;

    fn small() -> (Grid, KernelTable, DiscreteOperator, RadialKernel) {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let grid = Grid::with_default_buffer(4.0, 0.5, 1).unwrap();
        let table = KernelTable::build(&grid, &k, &TableOptions::default()).unwrap();
        let opr = DiscreteOperator::assemble(&grid, &table).unwrap();
        (grid, table, opr, k)
    }

    #[test]
    fn zero_and_constant_profiles() {
        let (grid, table, opr, _) = small();
        let n = grid.n_interior;
        assert!(opr.apply(&vec![0.0; n]).unwrap().iter().all(|&v| v == 0.0));
        let c = 0.7;
        let out = opr.apply(&vec![c; n]).unwrap();
        for x in 0..n {
            let expected = c * (2.0 * table.zero_order[x] + opr.ext_coupling[x]);
            assert_relative_eq!(out[x], expected, max_relative = 1e-10);
        }
        assert!(opr.apply(&vec![0.0; n + 1]).is_err());
    }

    #[test]
    fn symmetric_in_weighted_form() {
        let (_, _, opr, _) = small();
        let n = opr.len();
        for x in 0..n {
            for y in 0..x {
                let a = opr.weights[x] * opr.matrix[(x, y)];
                let b = opr.weights[y] * opr.matrix[(y, x)];
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn structure_and_injected_defect() {
        let (_, _, mut opr, _) = small();
        let rep = check_max_principle_structure(&opr, 7, 5);
        assert!(rep.z_pattern && rep.row_sums_positive && rep.monotone_probe);
        opr.matrix[(0, 1)] = 1e-3;
        assert!(!check_max_principle_structure(&opr, 7, 0).z_pattern);
    }

    #[test]
    fn homogeneous_solve_is_zero() {
        let (_, _, opr, _) = small();
        let n = opr.len();
        let u = opr.solve(&vec![1.0; n], &vec![0.0; n]).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_then_apply_reproduces_rhs() {
        let (_, _, opr, _) = small();
        let n = opr.len();
        let g: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = opr.solve(&vec![0.0; n], &g).unwrap();
        let lu = opr.apply(&u).unwrap();
        let err = lu.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn zero_residual_for_zero_profile() {
        let (grid, _, opr, _) = small();
        let probes = default_probes(&grid);
        let r = residual(&opr, &OddProfile::zeros(&grid), Potential::AllenCahn, &probes).unwrap();
        assert_eq!(r.sup, 0.0);
        assert!(residual(&opr, &OddProfile::zeros(&grid), Potential::AllenCahn, &[]).is_err());
    }
}
