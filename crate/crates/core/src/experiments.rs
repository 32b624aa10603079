//! Energy scaling scans, the cone-adapted competitor and volume
//! measurements.

use crate::doubly_radial::DoublyRadialPoint;
use crate::energy::{total_energy, Grid, KernelTable, OddProfile, Potential};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `S^{2m - 2g}`.
    BelowHalf,
    /// `S^{2m - 1} log S`.
    Half,
    /// `S^{2m - 1}`.
    AboveHalf,
}

impl Regime {
    pub fn of(gamma: f64) -> Self {
        if (gamma - 0.5).abs() < 1e-12 {
            Regime::Half
        } else if gamma < 0.5 {
            Regime::BelowHalf
        } else {
            Regime::AboveHalf
        }
    }
}

pub fn theoretical_exponent(m: usize, gamma: f64) -> f64 {
    let n = 2.0 * m as f64;
    match Regime::of(gamma) {
        Regime::BelowHalf => n - 2.0 * gamma,
        Regime::Half | Regime::AboveHalf => n - 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "S")]
    pub s: f64,
    pub e_total: f64,
    pub e_kin: f64,
    pub e_pot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScanRow>,
    /// Number of smallest radii left out of the fit.
    pub excluded: usize,
    pub slope: f64,
    pub intercept: f64,
    pub fit_residual: f64,
    pub theoretical_exponent: f64,
    pub regime: Regime,
    /// `(max - min) / min` of `E / (S^{2m-1} log S)` over all rows.
    pub flatness: Option<f64>,
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Relative spread `(max - min) / min`.
pub fn variation(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

/// Energies `E(u, B_S)` and the log-log fit. The two smallest radii are
/// left out when at least three remain.
pub fn energy_scan(
    profile: &OddProfile,
    s_list: &[f64],
    grid: &Grid,
    table: &KernelTable,
    pot: Potential,
    gamma: f64,
) -> Result<ScalingReport> {
    if s_list.len() < 3 {
        return Err(Error::Domain(format!("energy scan needs at least 3 radii, got {}", s_list.len())));
    }
    if s_list.windows(2).any(|w| !(w[1] > w[0])) || s_list[0] <= 1.0 {
        return Err(Error::Domain("radii must be increasing and larger than 1".into()));
    }
    let s_max = s_list[s_list.len() - 1];
    if s_max > grid.r - 4.0 {
        return Err(Error::Precondition(format!("largest S = {s_max} exceeds R - 4 = {}", grid.r - 4.0)));
    }
    let rows = s_list
        .iter()
        .map(|&s| {
            let e = total_energy(profile, s, grid, table, pot)?;
            Ok(ScanRow { s, e_total: e.total, e_kin: e.kinetic_in_in + e.kinetic_in_out, e_pot: e.potential })
        })
        .collect::<Result<Vec<_>>>()?;
    let excluded = if rows.len() >= 5 { 2 } else { 0 };
    let fit = &rows[excluded..];
    let lx: Vec<f64> = fit.iter().map(|r| r.s.ln()).collect();
    let ly: Vec<f64> = fit.iter().map(|r| r.e_total.ln()).collect();
    let (slope, intercept, fit_residual) = linear_fit(&lx, &ly);
    let regime = Regime::of(gamma);
    let n = 2.0 * grid.m as f64;
    let flatness = (regime == Regime::Half).then(|| {
        let q: Vec<f64> = rows.iter().map(|r| r.e_total / (r.s.powf(n - 1.0) * r.s.ln())).collect();
        variation(&q)
    });
    Ok(ScalingReport {
        rows,
        excluded,
        slope,
        intercept,
        fit_residual,
        theoretical_exponent: theoretical_exponent(grid.m, gamma),
        regime,
        flatness,
    })
}

/// `-1` on `[0, S+1]`, linear to `1` on `[S+1, S+2]`, `1` beyond.
pub fn phi_s(radius: f64, s: f64) -> Result<f64> {
    if s < 2.0 {
        return Err(Error::Domain(format!("S must be at least 2, got {s}")));
    }
    Ok(-1.0 + 2.0 * (radius - s - 1.0).clamp(0.0, 1.0))
}

/// `phi_S min{1, mu dist(x, C)}`.
pub fn psi_s(p: &DoublyRadialPoint, s: f64, mu: f64) -> Result<f64> {
    Ok(phi_s(p.norm(), s)? * (mu * p.cone_distance()).min(1.0))
}

/// `min{dist(x, ∂B_{S+1}), mu dist(x, C)}` for `|x| < S`.
pub fn d_s(p: &DoublyRadialPoint, s: f64, mu: f64) -> Result<f64> {
    let r = p.norm();
    if r >= s {
        return Err(Error::Domain(format!("|p| = {r} must be below S = {s}")));
    }
    Ok((s + 1.0 - r).min(mu * p.cone_distance()))
}

/// Grid edges `(a, b, length)` between cells whose centres lie in `B_radius`,
/// including edges to cone cells (`b = None`, value zero).
fn edges_in_ball(grid: &Grid, radius: f64) -> Vec<(usize, Option<usize>, f64)> {
    let mut out = Vec::new();
    for a in grid.interior() {
        if grid.nodes[a].norm() >= radius {
            continue;
        }
        let (i, j) = grid.cells[a];
        for (ni, nj) in [(i + 1, j), (i, j + 1)] {
            if nj == ni {
                out.push((a, None, grid.h));
            } else if let Some(b) = grid.index_of(ni, nj).filter(|&b| b < grid.n_interior) {
                if grid.nodes[b].norm() < radius {
                    out.push((a, Some(b), grid.h));
                }
            }
        }
    }
    out
}

fn edge_lipschitz(grid: &Grid, values: &[f64], radius: f64) -> f64 {
    edges_in_ball(grid, radius)
        .into_iter()
        .map(|(a, b, len)| (values[a] - b.map_or(0.0, |b| values[b])).abs() / len)
        .fold(0.0, f64::max)
}

pub const MU_FLOOR: f64 = 0.1;

/// Discrete Lipschitz constant of `u` on `B_radius`: edge difference
/// quotients and `|u| / dist(x, C)`, floored at [`MU_FLOOR`].
pub fn measure_mu(grid: &Grid, profile: &OddProfile, radius: f64) -> f64 {
    let edges = edge_lipschitz(grid, &profile.values, radius);
    let cone = grid
        .interior()
        .filter(|&x| grid.nodes[x].norm() < radius)
        .map(|x| profile.values[x].abs() / grid.nodes[x].cone_distance())
        .fold(0.0, f64::max);
    edges.max(cone).max(MU_FLOOR)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitorReport {
    #[serde(rename = "S")]
    pub s: f64,
    pub mu: f64,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
    /// `max |w - u|` on the ring `||x| - (S+2)| <= h/2`.
    pub h3_max_gap: f64,
    pub lip_u: f64,
    pub lip_w: f64,
    /// Largest `|w(x) - w(y)| dist(x, C) / |x - y|` over the pairs of the
    /// weighted bound, and the constant it is held to.
    pub h5_max_ratio: f64,
    pub h5_constant: f64,
    pub energy_u: f64,
    pub energy_w: f64,
    pub energy_ok: bool,
}

impl CompetitorReport {
    pub fn all_pass(&self) -> bool {
        self.h1 && self.h2 && self.h3 && self.h4 && self.h5 && self.energy_ok
    }
}

/// `w = min{u, Psi_S}` on `B_{S+2}` and `w = u` elsewhere.
pub fn competitor_profile(grid: &Grid, u: &OddProfile, s: f64, mu: f64) -> Result<OddProfile> {
    let mut values = u.values.clone();
    for x in grid.interior() {
        let p = &grid.nodes[x];
        if p.norm() <= s + 2.0 {
            values[x] = values[x].min(psi_s(p, s, mu)?);
        }
    }
    Ok(OddProfile { values })
}

/// Builds the competitor and checks its hypotheses and its energy against
/// `u` on `B_R`.
pub fn build_competitor(
    grid: &Grid,
    table: &KernelTable,
    pot: Potential,
    u: &OddProfile,
    s: f64,
    mu: f64,
) -> Result<(OddProfile, CompetitorReport)> {
    u.check(grid)?;
    if !(s + 4.0 < grid.r) {
        return Err(Error::Precondition(format!("S + 4 = {} must be below R = {}", s + 4.0, grid.r)));
    }
    if !(mu > 0.0) {
        return Err(Error::Precondition(format!("mu must be positive, got {mu}")));
    }
    let w = competitor_profile(grid, u, s, mu)?;
    let h = grid.h;
    let ball: Vec<usize> = grid.interior().filter(|&x| grid.nodes[x].norm() <= s + 2.0).collect();
    let h1 = ball.iter().all(|&x| (-1.0..=1.0).contains(&w.values[x]));
    // Vanishing on the cone: |w| stays below a linear bound in the cone distance.
    let slope_u = ball.iter().map(|&x| u.values[x].abs() / grid.nodes[x].cone_distance()).fold(0.0, f64::max);
    let h2 = ball
        .iter()
        .all(|&x| w.values[x].abs() <= mu.max(slope_u) * grid.nodes[x].cone_distance() * (1.0 + 1e-12));
    let h3_max_gap = grid
        .interior()
        .filter(|&x| (grid.nodes[x].norm() - (s + 2.0)).abs() <= 0.5 * h)
        .map(|x| (w.values[x] - u.values[x]).abs())
        .fold(0.0, f64::max);
    let h3 = h3_max_gap <= h;
    let h4 = grid
        .interior()
        .filter(|&x| grid.nodes[x].norm() < s && mu * grid.nodes[x].cone_distance() > 1.0)
        .all(|x| (w.values[x] + 1.0).abs() <= 1e-12);
    let lip_u = edge_lipschitz(grid, &u.values, s + 2.0);
    let lip_w = edge_lipschitz(grid, &w.values, s + 2.0);
    let lip_ok = lip_w <= lip_u.max(2.0 + mu) * (1.0 + 1e-12);
    let h5_constant = (2.0 * lip_w / mu).max(4.0);
    let inner: Vec<usize> = grid.interior().filter(|&x| grid.nodes[x].norm() < s + 1.0).collect();
    let far: Vec<usize> = inner.iter().copied().filter(|&x| mu * grid.nodes[x].cone_distance() >= 1.0).collect();
    let near: Vec<usize> = inner.iter().copied().filter(|&x| mu * grid.nodes[x].cone_distance() <= 1.0).collect();
    let mut h5_max_ratio: f64 = 0.0;
    for &x in &far {
        let (p, dx) = (grid.nodes[x], grid.nodes[x].cone_distance());
        for &y in &near {
            if x == y {
                continue;
            }
            let q = grid.nodes[y];
            let len = (p.s - q.s).hypot(p.t - q.t);
            h5_max_ratio = h5_max_ratio.max((w.values[x] - w.values[y]).abs() * dx / len);
        }
    }
    let h5 = lip_ok && h5_max_ratio <= h5_constant * (1.0 + 1e-12);
    let energy_u = total_energy(u, grid.r, grid, table, pot)?.total;
    let energy_w = total_energy(&w, grid.r, grid, table, pot)?.total;
    let report = CompetitorReport {
        s,
        mu,
        h1,
        h2,
        h3,
        h4,
        h5,
        h3_max_gap,
        lip_u,
        lip_w,
        h5_max_ratio,
        h5_constant,
        energy_u,
        energy_w,
        energy_ok: energy_w >= energy_u,
    };
    Ok((w, report))
}

/// Volume in `R^{2m}` of `(closed B_{S+2} \ B_S) ∪ (closed B_{S+2} ∩ {mu dist <= 1})`
/// from cell weights on both sides of the cone.
pub fn measure_omega_s(grid: &Grid, s: f64, mu: f64) -> Result<f64> {
    if s < 2.0 {
        return Err(Error::Domain(format!("S must be at least 2, got {s}")));
    }
    if s + 2.0 > grid.r_out {
        return Err(Error::Domain(format!("grid radius {} does not cover S + 2 = {}", grid.r_out, s + 2.0)));
    }
    let inside = |r: f64, dist: f64| r <= s + 2.0 && (r >= s || mu * dist <= 1.0);
    let cells: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .filter(|(p, _)| inside(p.norm(), p.cone_distance()))
        .map(|(_, w)| w)
        .sum();
    // A half cone cell is represented by its centroid, h / (3 sqrt 2) off the cone.
    let cone_dist = grid.h / (3.0 * std::f64::consts::SQRT_2);
    let cone: f64 = grid.cone_cells.iter().filter(|(p, _)| inside(p.norm(), cone_dist)).map(|(_, w)| w).sum();
    Ok(2.0 * (cells + cone))
}
