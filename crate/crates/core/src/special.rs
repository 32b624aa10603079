//! Special functions used by the kernel reductions.

use crate::{Error, Result};
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

/// Surface area of the unit sphere in `R^k`, i.e. `|S^{k-1}|`.
///
/// `k = 1` gives the two-point sphere `S^0` of measure 2.
pub fn sphere_area(k: usize) -> f64 {
    assert!(k >= 1, "sphere_area needs k >= 1");
    let half = k as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// `omega_{m-1} = |S^{m-1}|`, the measure of one O(m) orbit of unit radius.
pub fn omega(m: usize) -> f64 {
    sphere_area(m)
}

/// `c_m = 2 pi^{(m-1)/2} / Gamma((m-1)/2) = |S^{m-2}|` for `m >= 2`.
pub fn slice_constant(m: usize) -> f64 {
    assert!(m >= 2, "slice_constant needs m >= 2");
    sphere_area(m - 1)
}

/// The constant making `c |x|^{-n-2g}` the kernel of `(-Delta)^g` in `R^n`.
pub fn fractional_laplacian_constant(n: usize, g: f64) -> f64 {
    let nf = n as f64;
    4f64.powf(g) * gamma(nf / 2.0 + g) / (PI.powf(nf / 2.0) * gamma(-g).abs())
}

/// `B(a, b)` through log-gamma.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Result of a truncated double power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub shells: usize,
}

/// Appell's `F_2(a; b1, b2; c1, c2; x, y)` for `x, y >= 0`, `x + y < 1`.
///
/// Terms are summed in shells of constant total degree `i + j`. Once the
/// shell ratio `q` is below one and decreasing, the remainder is bounded by
/// the geometric tail `S_n q / (1 - q)`; summation stops when that bound
/// drops below `tol` times the partial sum.
pub fn appell_f2(
    a: f64,
    b: [f64; 2],
    c: [f64; 2],
    x: f64,
    y: f64,
    tol: f64,
    max_shells: usize,
) -> Result<SeriesValue> {
    if !(x >= 0.0 && y >= 0.0 && x + y < 1.0) {
        return Err(Error::Domain(format!(
            "F2 arguments must satisfy x, y >= 0 and x + y < 1 (x = {x}, y = {y})"
        )));
    }
    // prev[i] holds the term (i, n-1-i) of the previous shell.
    let mut prev = vec![1.0f64];
    let mut sum = 1.0f64;
    let mut last_shell = 1.0f64;
    let mut last_ratio = f64::INFINITY;
    for n in 1..=max_shells {
        let nf = n as f64;
        let mut cur = Vec::with_capacity(n + 1);
        for (i, &p) in prev.iter().enumerate() {
            let k = (n - 1 - i) as f64;
            cur.push(p * (a + nf - 1.0) * (b[1] + k) / ((c[1] + k) * (k + 1.0)) * y);
        }
        let i = (n - 1) as f64;
        cur.push(prev[n - 1] * (a + nf - 1.0) * (b[0] + i) / ((c[0] + i) * (i + 1.0)) * x);
        let shell: f64 = cur.iter().sum();
        sum += shell;
        let ratio = if last_shell > 0.0 { shell / last_shell } else { 0.0 };
        if shell == 0.0 {
            return Ok(SeriesValue { value: sum, tail_bound: 0.0, shells: n });
        }
        if ratio < 1.0 && ratio <= last_ratio {
            let tail = shell * ratio / (1.0 - ratio);
            if tail <= tol * sum {
                return Ok(SeriesValue { value: sum, tail_bound: tail, shells: n });
            }
        }
        last_ratio = ratio;
        last_shell = shell;
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "F2 series did not reach tolerance {tol} within {max_shells} shells (x + y = {})",
        x + y
    )))
}
