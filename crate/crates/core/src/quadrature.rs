//! Gauss-Jacobi rules for symmetric weights and adaptive Gauss-Kronrod
//! integration.

use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Gauss rule for the weight `(1 - x^2)^a` on `[-1, 1]`, `a > -1`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `int_{-1}^{1} (1 - x^2)^a dx`.
pub fn symmetric_jacobi_mass(a: f64) -> f64 {
    (0.5 * std::f64::consts::PI.ln() + ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp()
}

fn recurrence_coefficient(k: usize, a: f64) -> f64 {
    // Off-diagonal of the Jacobi matrix for P^{(a,a)}; k = 1 is written with
    // the removable factor (1 + 2a) cancelled so that a = -1/2 is regular.
    let kf = k as f64;
    let ab = 2.0 * a;
    if k == 1 {
        (4.0 * (1.0 + a) * (1.0 + a) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))).sqrt()
    } else {
        let num = 4.0 * kf * (kf + a) * (kf + a) * (kf + ab);
        let den = (2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0);
        (num / den).sqrt()
    }
}

impl GaussJacobi {
    pub fn new(order: usize, alpha: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("quadrature order must be positive".into()));
        }
        if !(alpha > -1.0) {
            return Err(Error::Domain(format!("Jacobi exponent must exceed -1, got {alpha}")));
        }
        let n = order;
        let b: Vec<f64> = (1..=n).map(|k| recurrence_coefficient(k, alpha)).collect();
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n - 1 {
            jm[(k, k + 1)] = b[k];
            jm[(k + 1, k)] = b[k];
        }
        let eig = SymmetricEigen::new(jm);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mu0 = symmetric_jacobi_mass(alpha);
        let p0 = 1.0 / mu0.sqrt();
        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            // Newton polish on the orthonormal recurrence, then Christoffel weights.
            for _ in 0..4 {
                let (pn, dpn, _) = orthonormal_eval(*x, &b, p0, n);
                if dpn == 0.0 {
                    break;
                }
                let step = pn / dpn;
                *x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, _, sumsq) = orthonormal_eval(*x, &b, p0, n);
            weights.push(1.0 / sumsq);
        }
        // Enforce exact symmetry of the rule.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { alpha, nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Returns `(p_n(x), p_n'(x), sum_{k<n} p_k(x)^2)` for the orthonormal family.
fn orthonormal_eval(x: f64, b: &[f64], p0: f64, n: usize) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut d_prev = 0.0;
    let mut p = p0;
    let mut d = 0.0;
    let mut sumsq = 0.0;
    let mut b_prev = 0.0;
    for k in 0..n {
        sumsq += p * p;
        let bk = b[k];
        let p_next = (x * p - b_prev * p_prev) / bk;
        let d_next = (p + x * d - b_prev * d_prev) / bk;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
        b_prev = bk;
    }
    (p, d, sumsq)
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * hl, ((kron - gauss) * hl).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive G7-K15 integration over `[a, b]` split at `breaks`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol*|I|)`
/// or after `max_pieces` subintervals; the returned error is the estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_pieces: usize,
) -> Integral {
    let mut cuts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&f, w[0], w[1]);
        evals += 15;
        total += v;
        err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_pieces {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Integral { value, error, evaluations: evals }
}
