//! Radial kernels, the square-root convexity criterion and the scalar
//! inequalities used to compare reflected kernel values.

use crate::{Error, Result};
use serde::Serialize;

/// Shape of a radial kernel profile `r -> K(r)` before the `c_norm` factor.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    /// `r^{-2m-2g}`.
    Fractional,
    /// `r^{-2m-2g}` on `(0,1)` and `1/(10 r^{2m+2g} - 9)` on `[1, inf)`.
    PiecewiseCounterexample,
    /// `exp(-r^p)`; outside the elliptic class, used for sign probes.
    Exponential { power: f64 },
    /// Samples `(r_i, K_i)` interpolated linearly in log-log coordinates.
    Tabulated { r: Vec<f64>, k: Vec<f64> },
}

impl KernelFamily {
    pub fn name(&self) -> String {
        match self {
            KernelFamily::Fractional => "fractional".into(),
            KernelFamily::PiecewiseCounterexample => "piecewise-counterexample".into(),
            KernelFamily::Exponential { power } => format!("exponential(p={power})"),
            KernelFamily::Tabulated { .. } => "tabulated".into(),
        }
    }
}

/// A radial kernel in `R^{2m}` with its ellipticity data.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialKernel {
    pub family: KernelFamily,
    pub m: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    pub c_norm: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::Domain("half-dimension m must be at least 1".into()))
    }
}

impl RadialKernel {
    pub fn fractional(m: usize, gamma: f64, c_norm: f64) -> Result<Self> {
        check_m(m)?;
        check_gamma(gamma)?;
        if !(c_norm > 0.0 && c_norm.is_finite()) {
            return Err(Error::Domain(format!("c_norm must be positive, got {c_norm}")));
        }
        Ok(Self {
            family: KernelFamily::Fractional,
            m,
            gamma,
            lambda: 1.0,
            big_lambda: 1.0,
            c_norm,
        })
    }

    pub fn counterexample(m: usize, gamma: f64) -> Result<Self> {
        check_m(m)?;
        check_gamma(gamma)?;
        Ok(Self {
            family: KernelFamily::PiecewiseCounterexample,
            m,
            gamma,
            lambda: 0.1,
            big_lambda: 1.0,
            c_norm: 1.0,
        })
    }

    /// `K(r) = exp(-r^power)`; `gamma` is kept only to label the dimension data.
    pub fn exponential(m: usize, power: f64) -> Result<Self> {
        check_m(m)?;
        if !(power > 0.0) {
            return Err(Error::Domain(format!("exponential power must be positive, got {power}")));
        }
        Ok(Self {
            family: KernelFamily::Exponential { power },
            m,
            gamma: 0.5,
            lambda: 0.0,
            big_lambda: 0.0,
            c_norm: 1.0,
        })
    }

    /// Tabulated profile; `lambda`/`big_lambda` are measured from the samples.
    pub fn tabulated(m: usize, gamma: f64, c_norm: f64, r: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        check_m(m)?;
        check_gamma(gamma)?;
        if r.len() != k.len() || r.len() < 2 {
            return Err(Error::Domain("table needs at least two (r, K) rows of equal length".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || r[0] <= 0.0 {
            return Err(Error::Domain("table radii must be positive and strictly increasing".into()));
        }
        if k.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Domain("table values must be positive and finite".into()));
        }
        let p = 2.0 * m as f64 + 2.0 * gamma;
        let ratios: Vec<f64> = r.iter().zip(&k).map(|(&ri, &ki)| ki * ri.powf(p)).collect();
        let lambda = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let big_lambda = ratios.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            family: KernelFamily::Tabulated { r, k },
            m,
            gamma,
            lambda,
            big_lambda,
            c_norm,
        })
    }

    /// `2m + 2 gamma`.
    pub fn exponent(&self) -> f64 {
        2.0 * self.m as f64 + 2.0 * self.gamma
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn is_fractional(&self) -> bool {
        matches!(self.family, KernelFamily::Fractional)
    }

    /// `K(r)`; errors for `r <= 0` and outside a table's range.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("kernel evaluated at nonpositive radius {r}")));
        }
        let v = self.profile(r * r);
        if v.is_nan() {
            return Err(Error::Domain(format!("radius {r} lies outside the kernel table")));
        }
        Ok(v)
    }

    /// `h(tau) = K(sqrt(tau))`; NaN outside a table's range.
    #[inline]
    pub fn profile(&self, tau: f64) -> f64 {
        let q = 0.5 * self.exponent();
        let v = match &self.family {
            KernelFamily::Fractional => tau.powf(-q),
            KernelFamily::PiecewiseCounterexample => {
                if tau < 1.0 {
                    tau.powf(-q)
                } else {
                    1.0 / (10.0 * tau.powf(q) - 9.0)
                }
            }
            KernelFamily::Exponential { power } => (-tau.powf(0.5 * power)).exp(),
            KernelFamily::Tabulated { r, k } => {
                let x = 0.5 * tau.ln();
                let lo = r[0].ln();
                let hi = r[r.len() - 1].ln();
                if !(x >= lo - 1e-12 && x <= hi + 1e-12) {
                    return f64::NAN;
                }
                let i = match r.partition_point(|&ri| ri.ln() <= x) {
                    0 => 0,
                    j if j >= r.len() => r.len() - 2,
                    j => j - 1,
                };
                let (x0, x1) = (r[i].ln(), r[i + 1].ln());
                let (y0, y1) = (k[i].ln(), k[i + 1].ln());
                (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).exp()
            }
        };
        self.c_norm * v
    }

    /// `h(a) - h(a + delta)` evaluated without cancellation for power laws.
    #[inline]
    pub fn profile_drop(&self, a: f64, delta: f64) -> f64 {
        match self.family {
            KernelFamily::Fractional => {
                let q = 0.5 * self.exponent();
                -self.c_norm * a.powf(-q) * (-q * (delta / a).ln_1p()).exp_m1()
            }
            KernelFamily::Exponential { power } if power == 2.0 => {
                if delta >= 0.0 {
                    -self.c_norm * (-a).exp() * (-delta).exp_m1()
                } else {
                    self.c_norm * (-(a + delta)).exp() * delta.exp_m1()
                }
            }
            _ => self.profile(a) - self.profile(a + delta),
        }
    }

    /// Coefficient `C` with `K(r) ~ C r^{-2m-2g}` at infinity, used for the
    /// analytic far-field tails (upper ellipticity bound for tables).
    pub fn tail_coefficient(&self) -> f64 {
        match self.family {
            KernelFamily::Fractional => self.c_norm,
            KernelFamily::PiecewiseCounterexample => 0.1 * self.c_norm,
            KernelFamily::Exponential { .. } => 0.0,
            KernelFamily::Tabulated { .. } => self.big_lambda * self.c_norm,
        }
    }

    /// Checks `lambda c r^{-p} <= K(r) <= Lambda c r^{-p}` at the given radii.
    pub fn ellipticity_holds(&self, radii: &[f64]) -> Result<bool> {
        if matches!(self.family, KernelFamily::Exponential { .. }) {
            return Ok(false);
        }
        let p = self.exponent();
        for &r in radii {
            let k = self.eval(r)?;
            let base = self.c_norm * r.powf(-p);
            let slack = 1e-12 * base;
            if k < self.lambda * base - slack || k > self.big_lambda * base + slack {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Verdict of the sampled midpoint-convexity test for `h(tau) = K(sqrt(tau))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityVerdict {
    StrictlyConvex,
    ConvexNonstrict,
    Fails,
}

/// A grid pair `(tau1, tau2)` and its relative midpoint gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub tau1: f64,
    pub tau2: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub verdict: ConvexityVerdict,
    /// Failing or tight pairs, most negative gap first (capped).
    pub witnesses: Vec<Witness>,
    pub failing_pairs: usize,
    pub tight_pairs: usize,
    pub min_gap: f64,
    /// Triples `(a, b, c)` on which midpoint concavity persists under refinement.
    pub concavity_intervals: Vec<(f64, f64)>,
}

/// Relative strictness threshold for midpoint gaps.
pub const CONVEXITY_TOL: f64 = 1e-10;
const WITNESS_CAP: usize = 64;
const NEAR_TIGHT: f64 = 1e-6;
const REFINE_POINTS: usize = 64;
const MAX_REFINEMENTS: usize = 16;
const CONCAVITY_DEPTH: usize = 4;

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// The default grid: 512 geometric points on `[1e-3, 1e3]`.
pub fn default_tau_grid() -> Vec<f64> {
    geometric_grid(1e-3, 1e3, 512)
}

fn midpoint_gap(k: &RadialKernel, t1: f64, t2: f64) -> Result<f64> {
    let mid = 0.5 * (t1 + t2);
    let (h1, h2, hm) = (k.profile(t1), k.profile(t2), k.profile(mid));
    if h1.is_nan() || h2.is_nan() || hm.is_nan() {
        return Err(Error::Domain(format!("tau range [{t1}, {t2}] outside the kernel table")));
    }
    let scale = hm.abs().max(f64::MIN_POSITIVE);
    Ok((h1 + h2 - 2.0 * hm) / scale)
}

fn concave_persistent(k: &RadialKernel, a: f64, c: f64, tol: f64, depth: usize) -> bool {
    let Ok(g) = midpoint_gap(k, a, c) else { return false };
    if g >= -tol {
        return false;
    }
    if depth == 0 {
        return true;
    }
    let b = 0.5 * (a + c);
    concave_persistent(k, a, b, tol, depth - 1) && concave_persistent(k, b, c, tol, depth - 1)
}

/// Midpoint convexity test of `tau -> K(sqrt(tau))` on all grid pairs.
///
/// Pairs whose relative gap is below `1e-6` trigger a 64-point local
/// refinement. A concavity interval is certified when a failing
/// equally spaced triple keeps failing on both halves through four
/// successive bisections.
pub fn check_sqrt_convexity(k: &RadialKernel, tau_grid: &[f64], tol: f64) -> Result<ConvexityReport> {
    if tau_grid.len() < 3 {
        return Err(Error::Domain("tau grid needs at least 3 points".into()));
    }
    if tau_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("tau grid entries must be positive".into()));
    }
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("tau grid must be strictly increasing".into()));
    }
    let mut witnesses = Vec::new();
    let mut failing = 0usize;
    let mut tight = 0usize;
    let mut min_gap = f64::INFINITY;
    let mut near_tight = Vec::new();
    let mut scan = |grid: &[f64], near: Option<&mut Vec<(f64, f64)>>| -> Result<()> {
        let mut near = near;
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let g = midpoint_gap(k, grid[i], grid[j])?;
                min_gap = min_gap.min(g);
                if g < -tol {
                    failing += 1;
                } else if g <= tol {
                    tight += 1;
                }
                if g <= tol {
                    witnesses.push(Witness { tau1: grid[i], tau2: grid[j], gap: g });
                }
                if g <= NEAR_TIGHT {
                    if let Some(n) = near.as_deref_mut() {
                        n.push((grid[i], grid[j]));
                    }
                }
            }
        }
        Ok(())
    };
    scan(tau_grid, Some(&mut near_tight))?;
    near_tight.sort_by(|a, b| (a.1 - a.0).partial_cmp(&(b.1 - b.0)).unwrap());
    for &(a, b) in near_tight.iter().take(MAX_REFINEMENTS) {
        let lo = (a - (b - a)).max(0.5 * a);
        let hi = b + (b - a);
        let local: Vec<f64> = (0..REFINE_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (REFINE_POINTS - 1) as f64)
            .collect();
        scan(&local, None)?;
    }
    witnesses.sort_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap());
    witnesses.truncate(WITNESS_CAP);

    let mut concavity_intervals = Vec::new();
    for i in 0..tau_grid.len() {
        for j in i + 1..tau_grid.len() {
            let (a, c) = (tau_grid[i], tau_grid[j]);
            if concave_persistent(k, a, c, tol, CONCAVITY_DEPTH) {
                concavity_intervals.push((a, c));
                if concavity_intervals.len() >= WITNESS_CAP {
                    break;
                }
            }
        }
        if concavity_intervals.len() >= WITNESS_CAP {
            break;
        }
    }

    let verdict = if failing > 0 {
        ConvexityVerdict::Fails
    } else if tight > 0 {
        ConvexityVerdict::ConvexNonstrict
    } else {
        ConvexityVerdict::StrictlyConvex
    };
    Ok(ConvexityReport {
        verdict,
        witnesses,
        failing_pairs: failing,
        tight_pairs: tight,
        min_gap,
        concavity_intervals,
    })
}

/// Bilinear combinations `A, B, C, D` for `(sx, tx)`, `(sy, ty)` in the
/// open region `s > t`.
pub fn abcd_coefficients(
    alpha: f64,
    beta: f64,
    sx: f64,
    tx: f64,
    sy: f64,
    ty: f64,
) -> Result<(f64, f64, f64, f64)> {
    if alpha < beta.abs() {
        return Err(Error::Precondition(format!("need alpha >= |beta|, got alpha={alpha}, beta={beta}")));
    }
    if !(sx > tx && tx >= 0.0 && sy > ty && ty >= 0.0) {
        return Err(Error::Precondition("both points must satisfy s > t >= 0".into()));
    }
    Ok((
        sx * sy * alpha + tx * ty * beta,
        sx * ty * alpha + tx * sy * beta,
        tx * sy * alpha + sx * ty * beta,
        tx * ty * alpha + sx * sy * beta,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbcdReport {
    pub dominance: bool,
    pub sum_inequality: bool,
}

pub fn abcd_inequalities(a: f64, b: f64, c: f64, d: f64) -> AbcdReport {
    let (a, b, c, d) = (a.abs(), b.abs(), c.abs(), d.abs());
    AbcdReport {
        dominance: a >= b && a >= c && a >= d,
        sum_inequality: a + d >= b + c,
    }
}

/// Evaluates `h(A) + h(D) >= h(B) + h(C)` under the hypotheses
/// `A = max{A,B,C,D}`, `A + D >= B + C`, `h` nondecreasing on the four points.
pub fn convex_quad_oracle<H: Fn(f64) -> f64>(h: H, a: f64, b: f64, c: f64, d: f64) -> Result<bool> {
    if !(a >= b && a >= c && a >= d) {
        return Err(Error::Precondition("A must be the largest of A, B, C, D".into()));
    }
    if a + d < b + c {
        return Err(Error::Precondition("need A + D >= B + C".into()));
    }
    let mut pts = [(a, h(a)), (b, h(b)), (c, h(c)), (d, h(d))];
    pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    if pts.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(Error::Precondition("h must be nondecreasing on the sampled points".into()));
    }
    Ok(h(a) + h(d) >= h(b) + h(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        assert_relative_eq!(k.eval(3.0).unwrap(), 1.0 / 27.0, max_relative = 1e-14);
        assert_relative_eq!(k.eval(1.0).unwrap(), 1.0);
        let c = RadialKernel::counterexample(1, 0.5).unwrap();
        assert_relative_eq!(c.eval(1.0).unwrap(), 1.0);
        assert!(k.eval(0.0).is_err());
        assert!(k.eval(-1.0).is_err());
    }

    #[test]
    fn c_norm_scales_unit_radius() {
        let k = RadialKernel::fractional(2, 0.3, 2.5).unwrap();
        assert_relative_eq!(k.eval(1.0).unwrap(), 2.5);
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(RadialKernel::fractional(1, 1.2, 1.0).is_err());
        assert!(RadialKernel::fractional(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_refuses_extrapolation() {
        let r: Vec<f64> = vec![0.5, 1.0, 2.0, 4.0];
        let k: Vec<f64> = r.iter().map(|&x: &f64| x.powf(-3.0)).collect();
        let t = RadialKernel::tabulated(1, 0.5, 1.0, r, k).unwrap();
        assert_relative_eq!(t.eval(1.5).unwrap(), 1.5f64.powf(-3.0), max_relative = 1e-12);
        assert!(t.eval(5.0).is_err());
        assert!(t.eval(0.25).is_err());
        assert_relative_eq!(t.lambda, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn ellipticity_sandwich() {
        let radii = geometric_grid(1e-2, 1e2, 200);
        let k = RadialKernel::fractional(1, 0.25, 1.0).unwrap();
        assert!(k.ellipticity_holds(&radii).unwrap());
        let c = RadialKernel::counterexample(2, 0.5).unwrap();
        assert!(c.ellipticity_holds(&radii).unwrap());
    }

    #[test]
    fn profile_drop_matches_difference() {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let (a, d) = (2.0, 0.5);
        assert_relative_eq!(k.profile_drop(a, d), k.profile(a) - k.profile(a + d), max_relative = 1e-13);
        let g = RadialKernel::exponential(1, 2.0).unwrap();
        assert_relative_eq!(g.profile_drop(a, d), g.profile(a) - g.profile(a + d), max_relative = 1e-13);
    }

    #[test]
    fn midpoint_examples() {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let gap = k.profile(1.0) + k.profile(3.0) - 2.0 * k.profile(2.0);
        assert_relative_eq!(gap, 0.48534, epsilon = 1e-5);
        let c = RadialKernel::counterexample(1, 0.5).unwrap();
        let lhs = c.profile(0.81) + c.profile(1.21);
        assert_relative_eq!(lhs, 1.6037, epsilon = 1e-4);
        assert!(lhs < 2.0 * c.profile(1.01));
    }

    #[test]
    fn fractional_is_strictly_convex() {
        for &g in &[0.1, 0.5, 0.9] {
            let k = RadialKernel::fractional(1, g, 1.0).unwrap();
            let r = check_sqrt_convexity(&k, &geometric_grid(1e-2, 1e2, 64), CONVEXITY_TOL).unwrap();
            assert_eq!(r.verdict, ConvexityVerdict::StrictlyConvex);
        }
    }

    #[test]
    fn affine_profile_is_nonstrict() {
        // K(r) = r^2 tabulated exactly: h(tau) = tau.
        let r: Vec<f64> = geometric_grid(0.1, 10.0, 50);
        let k: Vec<f64> = r.iter().map(|x| x * x).collect();
        let t = RadialKernel::tabulated(1, 0.5, 1.0, r, k).unwrap();
        let rep = check_sqrt_convexity(&t, &geometric_grid(0.02, 90.0, 40), CONVEXITY_TOL).unwrap();
        assert_eq!(rep.verdict, ConvexityVerdict::ConvexNonstrict);
        assert!(rep.concavity_intervals.is_empty());
    }

    #[test]
    fn counterexample_fails_without_concavity_interval() {
        let c = RadialKernel::counterexample(1, 0.5).unwrap();
        let grid = [0.5, 0.81, 1.01, 1.21, 2.0];
        let rep = check_sqrt_convexity(&c, &grid, CONVEXITY_TOL).unwrap();
        assert_eq!(rep.verdict, ConvexityVerdict::Fails);
        assert!(rep.witnesses.iter().any(|w| w.tau1 < 1.0 && w.tau2 > 1.0 && w.gap < 0.0));
        assert!(rep.concavity_intervals.is_empty());
        let (h1, h2, hm) = (c.profile(0.81), c.profile(1.21), c.profile(1.01));
        assert!((h1 - 1.3717).abs() < 1e-4 && (h2 - 0.23202).abs() < 1e-5 && (2.0 * hm - 1.7386).abs() < 1e-4);
        assert!(h1 + h2 < 2.0 * hm);
    }

    #[test]
    fn quartic_exponential_has_concavity_interval() {
        let k = RadialKernel::exponential(1, 4.0).unwrap();
        let rep = check_sqrt_convexity(&k, &geometric_grid(0.05, 2.0, 40), CONVEXITY_TOL).unwrap();
        assert_eq!(rep.verdict, ConvexityVerdict::Fails);
        assert!(!rep.concavity_intervals.is_empty());
        assert!(rep.concavity_intervals.iter().all(|&(_, c)| c < 0.75));
    }

    #[test]
    fn grid_validation() {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        assert!(check_sqrt_convexity(&k, &[1.0, 2.0], CONVEXITY_TOL).is_err());
        assert!(check_sqrt_convexity(&k, &[-1.0, 1.0, 2.0], CONVEXITY_TOL).is_err());
    }

    #[test]
    fn abcd_examples() {
        assert_eq!(abcd_coefficients(1.0, -1.0, 2.0, 1.0, 3.0, 1.0).unwrap(), (5.0, -1.0, 1.0, -5.0));
        assert_eq!(abcd_coefficients(1.0, 0.0, 2.0, 0.0, 3.0, 0.0).unwrap(), (6.0, 0.0, 0.0, 0.0));
        assert_eq!(abcd_coefficients(0.0, 0.0, 2.0, 1.0, 3.0, 1.0).unwrap(), (0.0, 0.0, 0.0, 0.0));
        assert!(abcd_coefficients(0.5, 1.0, 2.0, 1.0, 3.0, 1.0).is_err());
        assert!(abcd_coefficients(1.0, 0.0, 1.0, 2.0, 3.0, 1.0).is_err());
        let r = abcd_inequalities(5.0, -1.0, 1.0, -5.0);
        assert!(r.dominance && r.sum_inequality);
        assert!(!abcd_inequalities(1.0, 2.0, 0.0, 0.0).dominance);
    }

    #[test]
    fn quad_oracle_examples() {
        assert!(convex_quad_oracle(|x| x * x, 4.0, 3.0, 3.0, 2.0).unwrap());
        assert!(convex_quad_oracle(|x| x * x, 4.0, 3.0, 3.0, 4.0).unwrap());
        assert!(convex_quad_oracle(|x| x, 4.0, 3.0, 2.0, 1.0).unwrap());
        assert!(convex_quad_oracle(|x| x, 3.0, 4.0, 2.0, 1.0).is_err());
        assert!(convex_quad_oracle(|x| -x, 4.0, 3.0, 2.0, 1.0).is_err());
    }
}
