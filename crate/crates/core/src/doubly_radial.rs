//! Geometry of the Simons cone in the `(s, t)` quadrant and the reduced
//! kernels acting on doubly radial functions.
//!
//! A point `(s, t)` stands for the orbit `{ (x', x'') : |x'| = s, |x''| = t }`
//! of `O(m) x O(m)` in `R^{2m}`. The kernel `J(s,t,sigma,tau)` integrates
//! `K(|x - y|)` over both orbit spheres, so that the orbit average is
//! `Kbar = J / omega_{m-1}^2`.

use crate::kernels::RadialKernel;
use crate::quadrature::{integrate_adaptive, symmetric_jacobi_mass, GaussJacobi};
use crate::special::{appell_f2, beta, omega, slice_constant, sphere_area};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `s > t`.
    Outer,
    /// `s = t`.
    Cone,
    /// `s < t`.
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublyRadialPoint {
    pub s: f64,
    pub t: f64,
}

impl DoublyRadialPoint {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if s >= 0.0 && t >= 0.0 && s.is_finite() && t.is_finite() {
            Ok(Self { s, t })
        } else {
            Err(Error::Domain(format!("orbit coordinates must be nonnegative, got ({s}, {t})")))
        }
    }

    pub fn region(&self) -> Region {
        if self.s > self.t {
            Region::Outer
        } else if self.s < self.t {
            Region::Inner
        } else {
            Region::Cone
        }
    }

    pub fn star(&self) -> Self {
        Self { s: self.t, t: self.s }
    }

    pub fn cone_distance(&self) -> f64 {
        (self.s - self.t).abs() * FRAC_1_SQRT_2
    }

    pub fn norm(&self) -> f64 {
        self.s.hypot(self.t)
    }
}

/// Gauss-Jacobi ladder for the spherical slice weight `(1 - theta^2)^{(m-3)/2}`.
///
/// `levels[k]` has `base_order * 2^k` nodes, up to `max_order`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub m: usize,
    pub levels: Vec<GaussJacobi>,
}

pub const DEFAULT_ORDER: usize = 32;
pub const MAX_ORDER: usize = 256;
pub const J_REL_TOL: f64 = 1e-8;

impl QuadratureRule {
    pub fn new(m: usize, base_order: usize) -> Result<Self> {
        Self::with_max(m, base_order, MAX_ORDER.max(base_order))
    }

    pub fn with_max(m: usize, base_order: usize, max_order: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("half-dimension m must be at least 1".into()));
        }
        let mut levels = Vec::new();
        if m >= 2 {
            let mut n = base_order;
            while n <= max_order {
                levels.push(GaussJacobi::new(n, Self::exponent_for(m))?);
                n *= 2;
            }
            if levels.is_empty() {
                return Err(Error::Domain("base quadrature order exceeds the maximum".into()));
            }
        }
        Ok(Self { m, levels })
    }

    pub fn exponent_for(m: usize) -> f64 {
        (m as f64 - 3.0) / 2.0
    }

    pub fn order(&self) -> usize {
        self.levels.first().map_or(0, |g| g.order())
    }

    /// `int_{-1}^{1} (1 - theta^2)^{(m-3)/2} dtheta`.
    pub fn full_mass(&self) -> f64 {
        symmetric_jacobi_mass(Self::exponent_for(self.m))
    }
}

/// A quadrature estimate with its convergence record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JEstimate {
    pub value: f64,
    /// Difference between the last two orders (zero for closed forms).
    pub error: f64,
    pub order: usize,
    pub converged: bool,
}

fn check_pair(p: &DoublyRadialPoint, q: &DoublyRadialPoint) -> Result<()> {
    for c in [p.s, p.t, q.s, q.t] {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("negative orbit coordinate {c}")));
        }
    }
    if p.s == q.s && p.t == q.t {
        return Err(Error::Singular(format!("diagonal pair ({}, {})", p.s, p.t)));
    }
    Ok(())
}

fn j_closed_m1(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint) -> f64 {
    let a = p.s * p.s + p.t * p.t + q.s * q.s + q.t * q.t;
    let (bs, bt) = (2.0 * p.s * q.s, 2.0 * p.t * q.t);
    k.profile(a - bs - bt) + k.profile(a - bs + bt) + k.profile(a + bs - bt) + k.profile(a + bs + bt)
}

fn j_diff_closed_m1(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint) -> f64 {
    let a = p.s * p.s + p.t * p.t + q.s * q.s + q.t * q.t;
    let mut total = 0.0;
    for th in [-1.0, 1.0] {
        for tb in [-1.0, 1.0] {
            let base = a - 2.0 * p.s * q.s * th - 2.0 * p.t * q.t * tb;
            let delta = 2.0 * (q.s - q.t) * (p.s * th - p.t * tb);
            total += k.profile_drop(base, delta);
        }
    }
    total
}

/// `J` at one fixed Gauss-Jacobi level (m >= 2).
pub fn j_at_level(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, g: &GaussJacobi) -> f64 {
    let a = p.s * p.s + p.t * p.t + q.s * q.s + q.t * q.t;
    let (bs, bt) = (2.0 * p.s * q.s, 2.0 * p.t * q.t);
    let mut total = 0.0;
    for (&x, &wx) in g.nodes.iter().zip(&g.weights) {
        let ax = a - bs * x;
        let mut inner = 0.0;
        for (&y, &wy) in g.nodes.iter().zip(&g.weights) {
            inner += wy * k.profile(ax - bt * y);
        }
        total += wx * inner;
    }
    let cm = slice_constant(k.m);
    cm * cm * total
}

/// `J(p, q) - J(p, q*)` at one fixed level, differenced under the integral.
pub fn j_diff_at_level(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, g: &GaussJacobi) -> f64 {
    let a = p.s * p.s + p.t * p.t + q.s * q.s + q.t * q.t;
    let mut total = 0.0;
    for (&x, &wx) in g.nodes.iter().zip(&g.weights) {
        let mut inner = 0.0;
        for (&y, &wy) in g.nodes.iter().zip(&g.weights) {
            let base = a - 2.0 * p.s * q.s * x - 2.0 * p.t * q.t * y;
            let delta = 2.0 * (q.s - q.t) * (p.s * x - p.t * y);
            inner += wy * k.profile_drop(base, delta);
        }
        total += wx * inner;
    }
    let cm = slice_constant(k.m);
    cm * cm * total
}

fn adaptive<F: Fn(&GaussJacobi) -> f64>(rule: &QuadratureRule, f: F) -> Result<JEstimate> {
    let mut prev = f(&rule.levels[0]);
    if !prev.is_finite() {
        return Err(Error::Domain("kernel evaluated outside its range".into()));
    }
    let mut order = rule.levels[0].order();
    for g in &rule.levels[1..] {
        let cur = f(g);
        let err = (cur - prev).abs();
        order = g.order();
        if err <= J_REL_TOL * cur.abs() {
            return Ok(JEstimate { value: cur, error: err, order, converged: true });
        }
        prev = cur;
    }
    let err = if rule.levels.len() > 1 {
        let n = rule.levels.len();
        (f(&rule.levels[n - 1]) - f(&rule.levels[n - 2])).abs()
    } else {
        f64::NAN
    };
    Ok(JEstimate { value: prev, error: err, order, converged: false })
}

fn check_kernel_m(k: &RadialKernel, rule: &QuadratureRule) -> Result<()> {
    if k.m != rule.m {
        return Err(Error::Domain(format!("kernel has m = {} but the rule has m = {}", k.m, rule.m)));
    }
    Ok(())
}

/// `J(s,t,sigma,tau)` with its quadrature record.
pub fn j_kernel_estimate(
    k: &RadialKernel,
    p: &DoublyRadialPoint,
    q: &DoublyRadialPoint,
    rule: &QuadratureRule,
) -> Result<JEstimate> {
    check_pair(p, q)?;
    check_kernel_m(k, rule)?;
    if k.m == 1 {
        let v = j_closed_m1(k, p, q);
        if v.is_nan() {
            return Err(Error::Domain("kernel evaluated outside its range".into()));
        }
        return Ok(JEstimate { value: v, error: 0.0, order: 0, converged: true });
    }
    adaptive(rule, |g| j_at_level(k, p, q, g))
}

pub fn j_kernel(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, rule: &QuadratureRule) -> Result<f64> {
    j_kernel_estimate(k, p, q, rule).map(|e| e.value)
}

/// `J(p, q) - J(p, q*)` with its quadrature record.
pub fn j_difference_estimate(
    k: &RadialKernel,
    p: &DoublyRadialPoint,
    q: &DoublyRadialPoint,
    rule: &QuadratureRule,
) -> Result<JEstimate> {
    check_pair(p, q)?;
    check_pair(p, &q.star())?;
    check_kernel_m(k, rule)?;
    if k.m == 1 {
        let v = j_diff_closed_m1(k, p, q);
        if v.is_nan() {
            return Err(Error::Domain("kernel evaluated outside its range".into()));
        }
        return Ok(JEstimate { value: v, error: 0.0, order: 0, converged: true });
    }
    adaptive(rule, |g| j_diff_at_level(k, p, q, g))
}

/// Closed form of `J` for fractional kernels and `m >= 2`:
/// `c omega_{m-1}^2 F2(m+g; (m-1)/2, (m-1)/2; m-1, m-1; x, y) / D^{m+g}` with
/// `D = (s+sigma)^2 + (t+tau)^2`, `x = 4 s sigma / D`, `y = 4 t tau / D`.
pub fn j_kernel_appell(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, series_tol: f64) -> Result<f64> {
    check_pair(p, q)?;
    if !k.is_fractional() {
        return Err(Error::Domain("the hypergeometric form needs a fractional kernel".into()));
    }
    if k.m < 2 {
        return Err(Error::Domain("the hypergeometric form is stated for m >= 2".into()));
    }
    let (x, y, d) = appell_arguments(p, q);
    let m = k.m as f64;
    let a = m + k.gamma;
    let b = 0.5 * (m - 1.0);
    let series = appell_f2(a, [b, b], [m - 1.0, m - 1.0], x, y, series_tol, 50_000)?;
    let w = omega(k.m);
    Ok(k.c_norm * w * w * series.value * d.powf(-a))
}

/// The series arguments `(x, y)` and the denominator `D`.
pub fn appell_arguments(p: &DoublyRadialPoint, q: &DoublyRadialPoint) -> (f64, f64, f64) {
    let d = (p.s + q.s).powi(2) + (p.t + q.t).powi(2);
    (4.0 * p.s * q.s / d, 4.0 * p.t * q.t / d, d)
}

/// Prefactor of the hypergeometric form before the duplication formula is
/// applied: `c_m^2 2^{2m-4} B((m-1)/2, (m-1)/2)^2`.
pub fn appell_prefactor_unsimplified(m: usize) -> f64 {
    let cm = slice_constant(m);
    let b = 0.5 * (m as f64 - 1.0);
    cm * cm * 2f64.powi(2 * m as i32 - 4) * beta(b, b).powi(2)
}

/// `Kbar(x, y) = J / omega_{m-1}^2`.
pub fn kbar(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, rule: &QuadratureRule) -> Result<f64> {
    let w = omega(k.m);
    Ok(j_kernel(k, p, q, rule)? / (w * w))
}

fn require_outer(p: &DoublyRadialPoint) -> Result<()> {
    if p.region() == Region::Outer {
        Ok(())
    } else {
        Err(Error::Domain(format!("point ({}, {}) is not in the region s > t", p.s, p.t)))
    }
}

/// `Kbar(x, y) - Kbar(x, y*)` for `x, y` with `s > t`.
pub fn kernel_difference(k: &RadialKernel, p: &DoublyRadialPoint, q: &DoublyRadialPoint, rule: &QuadratureRule) -> Result<f64> {
    require_outer(p)?;
    require_outer(q)?;
    let w = omega(k.m);
    Ok(j_difference_estimate(k, p, q, rule)?.value / (w * w))
}

/// Distribution of sampled pairs `(p, q)` for the positivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PairSampler {
    /// Radius log-uniform on `[r_min, r_max]`, angle uniform in `(0, pi/4)`.
    LogUniform { r_min: f64, r_max: f64 },
    /// Pairs with `|p - q|^2 > l1` and `|p + q|^2 < l2` in the `(s, t)` plane.
    ConcavityWindow { l1: f64, l2: f64 },
}

impl Default for PairSampler {
    fn default() -> Self {
        PairSampler::LogUniform { r_min: 1e-2, r_max: 1e2 }
    }
}

impl PairSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> (DoublyRadialPoint, DoublyRadialPoint) {
        match *self {
            PairSampler::LogUniform { r_min, r_max } => {
                let mut point = || {
                    let r = rng.gen_range(r_min.ln()..r_max.ln()).exp();
                    let phi = rng.gen_range(0.0..PI / 4.0);
                    DoublyRadialPoint { s: r * phi.cos(), t: r * phi.sin() }
                };
                let p = point();
                let q = point();
                (p, q)
            }
            PairSampler::ConcavityWindow { l1, l2 } => {
                let top = l2.sqrt();
                loop {
                    let mut point = || {
                        let s: f64 = rng.gen_range(0.0..top);
                        let t: f64 = rng.gen_range(0.0..s.max(f64::MIN_POSITIVE));
                        DoublyRadialPoint { s, t }
                    };
                    let p = point();
                    let q = point();
                    let minus = (p.s - q.s).powi(2) + (p.t - q.t).powi(2);
                    let plus = (p.s + q.s).powi(2) + (p.t + q.t).powi(2);
                    if minus > l1 && plus < l2 && p.s > p.t && q.s > q.t {
                        return (p, q);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub n_samples: usize,
    pub violations: usize,
    /// Smallest relative gap `(J(p,q) - J(p,q*)) / J(p,q)`.
    pub min_gap: f64,
    pub min_gap_pair: Option<(DoublyRadialPoint, DoublyRadialPoint)>,
    /// Samples whose quadrature did not reach the doubling tolerance.
    pub unconverged: usize,
    /// Samples where both kernels underflowed, leaving the sign undetermined.
    pub undetermined: usize,
    /// Samples whose gap does not exceed its error estimate, so positivity
    /// is not certified either way.
    pub uncertified: usize,
    pub seed: u64,
    pub samples: Vec<(DoublyRadialPoint, DoublyRadialPoint, f64)>,
}

/// Sampled check of `Kbar(x,y) > Kbar(x,y*)` with the default sampler.
pub fn verify_kernel_inequality(k: &RadialKernel, seed: u64, n_samples: usize, rule: &QuadratureRule) -> Result<InequalityReport> {
    verify_kernel_inequality_with(k, PairSampler::default(), seed, n_samples, rule)
}

/// A sample counts as a violation when its gap is below minus the
/// quadrature error estimate (plus a rounding allowance).
pub fn verify_kernel_inequality_with(
    k: &RadialKernel,
    sampler: PairSampler,
    seed: u64,
    n_samples: usize,
    rule: &QuadratureRule,
) -> Result<InequalityReport> {
    use rayon::prelude::*;
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..n_samples).map(|_| sampler.draw(&mut rng)).collect();
    let evaluated: Vec<Result<(f64, f64, f64, bool)>> = pairs
        .par_iter()
        .map(|(p, q)| {
            let d = j_difference_estimate(k, p, q, rule)?;
            let j = j_kernel_estimate(k, p, q, rule)?;
            let js = j_kernel_estimate(k, p, &q.star(), rule)?;
            let tol = d.error + j.error + js.error + 64.0 * f64::EPSILON * (j.value + js.value);
            Ok((d.value, j.value, tol, d.converged && j.converged))
        })
        .collect();
    let mut report = InequalityReport {
        n_samples,
        violations: 0,
        min_gap: f64::INFINITY,
        min_gap_pair: None,
        unconverged: 0,
        undetermined: 0,
        uncertified: 0,
        seed,
        samples: Vec::with_capacity(n_samples),
    };
    for ((p, q), r) in pairs.into_iter().zip(evaluated) {
        let (diff, j, tol, converged) = r?;
        if !converged {
            report.unconverged += 1;
        }
        if j == 0.0 {
            report.undetermined += 1;
            report.samples.push((p, q, f64::NAN));
            continue;
        }
        let rel = diff / j;
        if diff < -tol {
            report.violations += 1;
        } else if diff <= tol {
            report.uncertified += 1;
        }
        if rel < report.min_gap {
            report.min_gap = rel;
            report.min_gap_pair = Some((p, q));
        }
        report.samples.push((p, q, rel));
    }
    Ok(report)
}

/// Truncation radius and accuracy for the zero-order coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroOrderOptions {
    pub r_out: f64,
    pub rel_tol: f64,
}

/// Angular moments of `{s > t}` on the unit sphere of `R^{2m}`:
/// `(|S|/2, int |y'|^2, int |y''|^2)`.
fn outer_moments(m: usize) -> (f64, f64, f64) {
    let area = sphere_area(2 * m);
    let b = 0.5 * m as f64;
    let q = area * 4f64.powf(-b) / (b * beta(b, b));
    (0.5 * area, 0.25 * area + 0.5 * q, 0.25 * area - 0.5 * q)
}

/// Far-field integrals of `K(|x - y|)` over `|y| > rho` restricted to
/// `{s > t}` (`outer`) or `{s < t}` (`inner`), from the power-law tail of `K`
/// expanded to second order in `|x| / rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarField {
    pub outer: f64,
    pub inner: f64,
}

pub fn far_field(k: &RadialKernel, p: &DoublyRadialPoint, rho: f64) -> FarField {
    let c = k.tail_coefficient();
    if c == 0.0 {
        return FarField { outer: 0.0, inner: 0.0 };
    }
    let g = k.gamma;
    let q = k.exponent();
    let m = k.m as f64;
    let (half, po1, po2) = outer_moments(k.m);
    let lead = half * rho.powf(-2.0 * g) / (2.0 * g);
    let r2 = p.s * p.s + p.t * p.t;
    let second = rho.powf(-2.0 * g - 2.0) / (2.0 * g + 2.0);
    let iso = -0.5 * q * r2 * half;
    let aniso = 0.5 * q * (q + 2.0) / m;
    FarField {
        outer: c * (lead + (iso + aniso * (p.s * p.s * po1 + p.t * p.t * po2)) * second),
        inner: c * (lead + (iso + aniso * (p.s * p.s * po2 + p.t * p.t * po1)) * second),
    }
}

/// `int_{s>t} Kbar(x, y*) dy` over `|y| < R_out` in `(sigma, tau)` variables
/// with weight `omega^2 sigma^{m-1} tau^{m-1}`, plus the far-field tail.
///
/// The integrand peaks at the cone point nearest to `p*`; the integration
/// runs in coordinates normal and tangent to the cone, with breakpoints on
/// the scale of the cone distance.
pub fn zero_order_coefficient(
    k: &RadialKernel,
    p: &DoublyRadialPoint,
    opts: &ZeroOrderOptions,
    rule: &QuadratureRule,
) -> Result<f64> {
    require_outer(p)?;
    check_kernel_m(k, rule)?;
    if !(opts.r_out > 2.0 * p.norm()) {
        return Err(Error::Domain(format!(
            "R_out = {} must exceed twice |p| = {}",
            opts.r_out,
            p.norm()
        )));
    }
    let level = rule.levels.first();
    let m = k.m;
    let x = *p;
    let integrand = move |sigma: f64, tau: f64| -> f64 {
        let q = DoublyRadialPoint { s: sigma, t: tau };
        let j = match (m, level) {
            (1, _) => j_closed_m1(k, &x, &q),
            (_, Some(g)) => j_at_level(k, &x, &q, g),
            _ => f64::NAN,
        };
        if m == 1 {
            j
        } else {
            j * (sigma * tau).powi(m as i32 - 1)
        }
    };
    let d = p.cone_distance();
    let v0 = (p.s + p.t) * FRAC_1_SQRT_2;
    let u_max = opts.r_out * FRAC_1_SQRT_2;
    let mut u_breaks = Vec::new();
    let mut b = 0.25 * d;
    while b < u_max {
        u_breaks.push(b);
        b *= 2.0;
    }
    let inner_tol = 0.1 * opts.rel_tol;
    let outer = |u: f64| -> f64 {
        let v_hi = (opts.r_out * opts.r_out - u * u).max(0.0).sqrt();
        if v_hi <= u {
            return 0.0;
        }
        let w = u + d;
        let breaks: Vec<f64> = [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|f| v0 + f * w)
            .collect();
        let f = |v: f64| {
            let sigma = (v - u) * FRAC_1_SQRT_2;
            let tau = (v + u) * FRAC_1_SQRT_2;
            integrand(sigma.max(0.0), tau)
        };
        integrate_adaptive(f, u, v_hi, &breaks, inner_tol, 0.0, 400).value
    };
    let res = integrate_adaptive(outer, 0.0, u_max, &u_breaks, opts.rel_tol, 0.0, 400);
    if !res.value.is_finite() {
        return Err(Error::Domain("zero-order integrand left the kernel range".into()));
    }
    Ok(res.value + far_field(k, p, opts.r_out).inner)
}

/// Independent evaluation of `int_{s<t} K(|x - y|) dy` for `m = 1` and a
/// fractional kernel: rays from `x` cross each wedge of `{|y1| < |y2|}` in
/// one segment whose radial integral is explicit.
pub fn zero_order_by_rays(k: &RadialKernel, p: &DoublyRadialPoint, rel_tol: f64) -> Result<f64> {
    require_outer(p)?;
    if k.m != 1 || !k.is_fractional() {
        return Err(Error::Domain("ray evaluation needs m = 1 and a fractional kernel".into()));
    }
    let (x1, x2) = (p.s, p.t);
    let two_g = 2.0 * k.gamma;
    let segment = |lines: [(f64, f64, f64); 2], c: f64, s: f64| -> f64 {
        // Each line is (a1, a2, sign): constraint sign * (a1 y1 + a2 y2) > 0.
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        for (a1, a2, sg) in lines {
            let a = sg * (a1 * x1 + a2 * x2);
            let b = sg * (a1 * c + a2 * s);
            if b > 0.0 {
                lo = lo.max(-a / b);
            } else if b < 0.0 {
                hi = hi.min(-a / b);
            } else if a <= 0.0 {
                return 0.0;
            }
        }
        if lo >= hi {
            return 0.0;
        }
        let lo_term = if lo > 0.0 { lo.powf(-two_g) } else { f64::INFINITY };
        let hi_term = if hi.is_finite() { hi.powf(-two_g) } else { 0.0 };
        (lo_term - hi_term) / two_g
    };
    let f = |phi: f64| -> f64 {
        let (c, s) = (phi.cos(), phi.sin());
        // Upper wedge: y2 - y1 > 0, y2 + y1 > 0; lower wedge: both < 0.
        segment([(-1.0, 1.0, 1.0), (1.0, 1.0, 1.0)], c, s)
            + segment([(-1.0, 1.0, -1.0), (1.0, 1.0, -1.0)], c, s)
    };
    let apex = (-x2).atan2(-x1).rem_euclid(2.0 * PI);
    let breaks = [0.25 * PI, 0.75 * PI, 1.25 * PI, 1.75 * PI, apex];
    let res = integrate_adaptive(f, 0.0, 2.0 * PI, &breaks, rel_tol, 0.0, 4000);
    Ok(k.c_norm * res.value)
}
