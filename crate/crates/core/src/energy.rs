//! Discrete odd energy on a cell-centred `(s, t)` grid.
//!
//! Unknowns live on the cells of `{t < s}` inside `B_R`; cells between `R`
//! and `R_out` carry the zero extension and enter through precomputed row
//! sums, and the region beyond `R_out` through the far-field expansion.
//! Cells cut by the cone are kept separately: their value is zero by
//! oddness, but they count towards volumes and the potential of `w = 0`.

use crate::doubly_radial::{
    far_field, j_at_level, j_diff_at_level, j_difference_estimate, j_kernel_estimate, zero_order_coefficient,
    DoublyRadialPoint, QuadratureRule, ZeroOrderOptions, DEFAULT_ORDER,
};
use crate::kernels::{KernelFamily, RadialKernel};
use crate::quadrature::integrate_adaptive;
use crate::special::omega;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub r: f64,
    pub h: f64,
    pub m: usize,
    pub r_out: f64,
    /// Interior cells (`|x| < R`) first, then exterior cells up to `R_out`.
    pub nodes: Vec<DoublyRadialPoint>,
    pub cells: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub n_interior: usize,
    /// Centres of the cells crossed by the cone, with their half weights.
    pub cone_cells: Vec<(DoublyRadialPoint, f64)>,
    #[serde(skip)]
    lookup: Vec<Option<usize>>,
    #[serde(skip)]
    side: usize,
}

impl Grid {
    pub fn new(r: f64, h: f64, m: usize, r_out: f64) -> Result<Self> {
        if !(h > 0.0 && h < r && r < r_out) {
            return Err(Error::Domain(format!("grid needs 0 < h < R < R_out, got h = {h}, R = {r}, R_out = {r_out}")));
        }
        if m == 0 {
            return Err(Error::Domain("half-dimension m must be at least 1".into()));
        }
        let side = (r_out / h).ceil() as usize + 1;
        let w0 = omega(m).powi(2) * h * h;
        let weight = |s: f64, t: f64| w0 * (s * t).powi(m as i32 - 1);
        let mut interior = Vec::new();
        let mut exterior = Vec::new();
        let mut cone_cells = Vec::new();
        for i in 0..side {
            let s = (i as f64 + 0.5) * h;
            for j in 0..=i {
                let t = (j as f64 + 0.5) * h;
                let norm = s.hypot(t);
                if norm > r_out {
                    continue;
                }
                let p = DoublyRadialPoint { s, t };
                if j == i {
                    cone_cells.push((p, 0.5 * weight(s, t)));
                } else if norm < r {
                    interior.push((i, j, p));
                } else {
                    exterior.push((i, j, p));
                }
            }
        }
        let n_interior = interior.len();
        let mut lookup = vec![None; side * side];
        let mut nodes = Vec::new();
        let mut cells = Vec::new();
        let mut weights = Vec::new();
        for (k, (i, j, p)) in interior.into_iter().chain(exterior).enumerate() {
            lookup[i * side + j] = Some(k);
            nodes.push(p);
            cells.push((i, j));
            weights.push(weight(p.s, p.t));
        }
        Ok(Self { r, h, m, r_out, nodes, cells, weights, n_interior, cone_cells, lookup, side })
    }

    /// Default outer radius `1.5 R`.
    pub fn with_default_buffer(r: f64, h: f64, m: usize) -> Result<Self> {
        Self::new(r, h, m, 1.5 * r)
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.side && j < self.side {
            self.lookup[i * self.side + j]
        } else {
            None
        }
    }

    pub fn interior(&self) -> std::ops::Range<usize> {
        0..self.n_interior
    }

    /// Interior nodes with `|x| < s`.
    pub fn interior_in_ball(&self, s: f64) -> Vec<usize> {
        self.interior().filter(|&k| self.nodes[k].norm() < s).collect()
    }

    /// Total weight of `{t < s} ∩ B_s` including the half cone cells.
    pub fn outer_volume(&self, s: f64) -> f64 {
        let cells: f64 = (0..self.nodes.len())
            .filter(|&k| self.nodes[k].norm() < s)
            .map(|k| self.weights[k])
            .sum();
        let cone: f64 = self.cone_cells.iter().filter(|(p, _)| p.norm() < s).map(|(_, w)| w).sum();
        cells + cone
    }
}

/// Values `w~(s,t)` on the interior cells of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddProfile {
    pub values: Vec<f64>,
}

impl OddProfile {
    pub fn zeros(grid: &Grid) -> Self {
        Self { values: vec![0.0; grid.n_interior] }
    }

    pub fn from_fn<F: Fn(&DoublyRadialPoint) -> f64>(grid: &Grid, f: F) -> Self {
        Self { values: grid.nodes[..grid.n_interior].iter().map(f).collect() }
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.values.len() != grid.n_interior {
            return Err(Error::Dimension { expected: grid.n_interior, got: self.values.len() });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile has non-finite values".into()));
        }
        Ok(())
    }

    /// Value of the odd extension at an arbitrary cell, `0` on the cone and
    /// outside `B_R`.
    pub fn at_cell(&self, grid: &Grid, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b, sign) = if i > j { (i, j, 1.0) } else { (j, i, -1.0) };
        match grid.index_of(a, b) {
            Some(k) if k < grid.n_interior => sign * self.values[k],
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Potential {
    /// `G(u) = (1 - u^2)^2 / 4`, `f(u) = u - u^3`.
    AllenCahn,
    Zero,
}

impl Potential {
    pub fn g(&self, u: f64) -> f64 {
        match self {
            Potential::AllenCahn => 0.25 * (1.0 - u * u).powi(2),
            Potential::Zero => 0.0,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self {
            Potential::AllenCahn => u - u * u * u,
            Potential::Zero => 0.0,
        }
    }

    /// `sup |f|` on `[0, 1]`.
    pub fn sup_f(&self) -> f64 {
        match self {
            Potential::AllenCahn => 2.0 / (3.0 * 3f64.sqrt()),
            Potential::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic_in_in: f64,
    pub kinetic_in_out: f64,
    pub potential: f64,
    pub total: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

/// `Kbar(x,y) - Kbar(x,y*)` and `Kbar(x,y*)` for every ordered pair of a
/// point set, with the diagonal of the difference set to zero.
#[derive(Debug, Clone)]
pub struct PairTable {
    pub points: Vec<DoublyRadialPoint>,
    pub weights: Vec<f64>,
    pub diff: Vec<f64>,
    pub kstar: Vec<f64>,
}

impl PairTable {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diff_at(&self, x: usize, y: usize) -> f64 {
        self.diff[x * self.len() + y]
    }

    pub fn kstar_at(&self, x: usize, y: usize) -> f64 {
        self.kstar[x * self.len() + y]
    }

    /// Builds the table for points strictly inside `{t < s}`.
    pub fn build(k: &RadialKernel, points: Vec<DoublyRadialPoint>, weights: Vec<f64>, rule: &QuadratureRule) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Dimension { expected: points.len(), got: weights.len() });
        }
        let n = points.len();
        let w2 = omega(k.m).powi(2);
        let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut d = vec![0.0; n];
                let mut ks = vec![0.0; n];
                for y in 0..n {
                    let p = &points[x];
                    let q = &points[y];
                    ks[y] = j_kernel_estimate(k, p, &q.star(), rule)?.value / w2;
                    if x != y {
                        d[y] = j_difference_estimate(k, p, q, rule)?.value / w2;
                    }
                }
                Ok((d, ks))
            })
            .collect();
        let mut diff = Vec::with_capacity(n * n);
        let mut kstar = Vec::with_capacity(n * n);
        for r in rows {
            let (d, ks) = r?;
            diff.extend(d);
            kstar.extend(ks);
        }
        Ok(Self { points, weights, diff, kstar })
    }
}

/// `I_w(A, B) = 2 sum |w(x)-w(y)|^2 (Kbar - Kbar*) w_x w_y + 4 sum (w(x)^2 + w(y)^2) Kbar* w_x w_y`
/// over table indices; the diagonal carries only the second term.
pub fn interaction(values: &[f64], a: &[usize], b: &[usize], table: &PairTable) -> Result<f64> {
    let n = table.len();
    if values.len() != n {
        return Err(Error::Dimension { expected: n, got: values.len() });
    }
    if let Some(&bad) = a.iter().chain(b).find(|&&i| i >= n) {
        return Err(Error::Domain(format!("index {bad} is not covered by the table")));
    }
    let mut total = 0.0;
    for &x in a {
        let mut row = 0.0;
        for &y in b {
            let dw = values[x] - values[y];
            let ww = table.weights[y];
            row += (2.0 * dw * dw * table.diff_at(x, y) + 4.0 * (values[x].powi(2) + values[y].powi(2)) * table.kstar_at(x, y)) * ww;
        }
        total += row * table.weights[x];
    }
    Ok(total)
}

/// Energy of the odd extension computed purely from a pair table:
/// `1/4 (I(A, A) + 2 I(A, A^c)) + 2 sum_A G(w) w_x`, with `A^c` the rest of
/// the table.
pub fn table_energy(values: &[f64], in_a: &[bool], table: &PairTable, pot: Potential) -> Result<f64> {
    let a: Vec<usize> = (0..table.len()).filter(|&i| in_a[i]).collect();
    let ac: Vec<usize> = (0..table.len()).filter(|&i| !in_a[i]).collect();
    let kin = 0.25 * (interaction(values, &a, &a, table)? + 2.0 * interaction(values, &a, &ac, table)?);
    let pot_sum: f64 = a.iter().map(|&x| pot.g(values[x]) * table.weights[x]).sum();
    Ok(kin + 2.0 * pot_sum)
}

/// The same energy evaluated on the explicit odd extension over the table
/// points and their mirror images, `1/4 sum |w(x)-w(y)|^2 Kbar(x,y)` over
/// pairs not both outside `A ∪ A*`, plus `sum G(w)` over `A ∪ A*`.
pub fn mirrored_energy(values: &[f64], in_a: &[bool], table: &PairTable, pot: Potential) -> Result<f64> {
    let n = table.len();
    if values.len() != n || in_a.len() != n {
        return Err(Error::Dimension { expected: n, got: values.len().min(in_a.len()) });
    }
    // Index k < n is a point of the table, k >= n its mirror image.
    let val = |k: usize| if k < n { values[k] } else { -values[k - n] };
    let kb = |x: usize, y: usize| -> f64 {
        let (xi, xm) = (x % n, x >= n);
        let (yi, ym) = (y % n, y >= n);
        let kstar = table.kstar_at(xi, yi);
        if xm == ym {
            table.diff_at(xi, yi) + kstar
        } else {
            kstar
        }
    };
    let mut kin = 0.0;
    for x in 0..2 * n {
        for y in 0..2 * n {
            if x == y || (!in_a[x % n] && !in_a[y % n]) {
                continue;
            }
            let dw = val(x) - val(y);
            kin += dw * dw * kb(x, y) * table.weights[x % n] * table.weights[y % n];
        }
    }
    let pot_sum: f64 = (0..n).filter(|&x| in_a[x]).map(|x| pot.g(values[x]) * table.weights[x]).sum();
    Ok(0.25 * kin + 2.0 * pot_sum)
}

/// Options for [`KernelTable::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableOptions {
    pub quadrature_order: usize,
    pub zero_order_rel_tol: f64,
    /// Truncation radius of the zero-order integral as a multiple of `R_out`.
    pub zero_order_radius_factor: f64,
    pub max_bytes: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            quadrature_order: DEFAULT_ORDER,
            zero_order_rel_tol: 1e-7,
            zero_order_radius_factor: 3.0,
            max_bytes: 1_500_000_000,
        }
    }
}

/// Everything the energy and the operator need about a kernel on a grid.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub n: usize,
    /// `Kbar(x,y) - Kbar(x,y*)` between interior nodes, row-major.
    pub diff: Vec<f64>,
    /// `Kbar(x,y*)` between interior nodes, diagonal included.
    pub kstar: Vec<f64>,
    /// Continuum zero-order coefficient at each interior node.
    pub zero_order: Vec<f64>,
    /// `sum_ext (Kbar - Kbar*) w_y` plus the far field beyond `R_out`.
    pub ext_diff: Vec<f64>,
    /// `sum_ext Kbar* w_y` plus the far field beyond `R_out`.
    pub ext_kstar: Vec<f64>,
    pub loc_coefficient: f64,
    pub gamma: f64,
    pub min_offdiag_diff: f64,
}

/// Coefficient of `|z|^{-2-2g}` in the planar reduction of the kernel near
/// the diagonal; zero for kernels that stay bounded there.
pub fn planar_singular_coefficient(k: &RadialKernel) -> f64 {
    let c = match &k.family {
        KernelFamily::Fractional | KernelFamily::PiecewiseCounterexample => k.c_norm,
        KernelFamily::Exponential { .. } => 0.0,
        KernelFamily::Tabulated { r, k: kv } => k.c_norm * kv[0] * r[0].powf(k.exponent()),
    };
    let m = k.m as f64;
    c * PI.powf(m - 1.0) * gamma(1.0 + k.gamma) / gamma(m + k.gamma)
}

/// `int_{[-1,1]^2} |z|^{-2g} (1 - |z1|)(1 - |z2|) dz`.
pub fn self_cell_moment(g: f64) -> f64 {
    let inner = |z1: f64| {
        integrate_adaptive(
            |z2: f64| (z1 * z1 + z2 * z2).powf(-g) * (1.0 - z2),
            0.0,
            1.0,
            &[z1.min(0.5)],
            1e-12,
            0.0,
            200,
        )
        .value
            * (1.0 - z1)
    };
    4.0 * integrate_adaptive(inner, 0.0, 1.0, &[1e-3, 1e-2, 0.1], 1e-11, 0.0, 400).value
}

/// `c_loc` in `E_loc = c_loc h^{2-2g} sum w_x |grad_h w|^2`.
pub fn local_coefficient(k: &RadialKernel) -> f64 {
    planar_singular_coefficient(k) * self_cell_moment(k.gamma) / 4.0
}

impl KernelTable {
    pub fn build(grid: &Grid, k: &RadialKernel, opts: &TableOptions) -> Result<Self> {
        if k.m != grid.m {
            return Err(Error::Domain(format!("kernel m = {} but grid m = {}", k.m, grid.m)));
        }
        let n = grid.n_interior;
        let bytes = 2 * n * n * std::mem::size_of::<f64>();
        if bytes > opts.max_bytes {
            return Err(Error::Memory(format!(
                "{n} interior nodes need {} MB of kernel tables (cap {} MB); increase h or reduce R",
                bytes / 1_000_000,
                opts.max_bytes / 1_000_000
            )));
        }
        let rule = QuadratureRule::new(k.m, opts.quadrature_order)?;
        let w2 = omega(k.m).powi(2);
        let nodes = &grid.nodes;
        let weights = &grid.weights;
        let level = rule.levels.first();
        let pair = |p: &DoublyRadialPoint, q: &DoublyRadialPoint| -> (f64, f64) {
            match level {
                None => {
                    let kstar = j_kernel_estimate(k, p, &q.star(), &rule).map_or(f64::NAN, |e| e.value);
                    let d = if p == q { 0.0 } else { j_difference_estimate(k, p, q, &rule).map_or(f64::NAN, |e| e.value) };
                    (d / w2, kstar / w2)
                }
                Some(g) => {
                    let kstar = j_at_level(k, p, &q.star(), g);
                    let d = if p == q { 0.0 } else { j_diff_at_level(k, p, q, g) };
                    (d / w2, kstar / w2)
                }
            }
        };
        let r_z = opts.zero_order_radius_factor * grid.r_out;
        let z_opts = ZeroOrderOptions { r_out: r_z, rel_tol: opts.zero_order_rel_tol };
        let rows: Vec<Result<(Vec<f64>, Vec<f64>, f64, f64, f64)>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let p = &nodes[x];
                let mut d = vec![0.0; n];
                let mut ks = vec![0.0; n];
                for y in 0..n {
                    let (a, b) = pair(p, &nodes[y]);
                    d[y] = a;
                    ks[y] = b;
                }
                let mut ed = 0.0;
                let mut ek = 0.0;
                for y in n..nodes.len() {
                    let (a, b) = pair(p, &nodes[y]);
                    ed += a * weights[y];
                    ek += b * weights[y];
                }
                let ff = far_field(k, p, grid.r_out);
                ed += ff.outer - ff.inner;
                ek += ff.inner;
                let z = zero_order_coefficient(k, p, &z_opts, &rule)?;
                if d.iter().chain(&ks).any(|v| !v.is_finite()) {
                    return Err(Error::Domain(format!("kernel table entry at ({}, {}) is not finite", p.s, p.t)));
                }
                Ok((d, ks, z, ed, ek))
            })
            .collect();
        let mut diff = Vec::with_capacity(n * n);
        let mut kstar = Vec::with_capacity(n * n);
        let mut zero_order = Vec::with_capacity(n);
        let mut ext_diff = Vec::with_capacity(n);
        let mut ext_kstar = Vec::with_capacity(n);
        for r in rows {
            let (d, ks, z, ed, ek) = r?;
            diff.extend(d);
            kstar.extend(ks);
            zero_order.push(z);
            ext_diff.push(ed);
            ext_kstar.push(ek);
        }
        let min_offdiag_diff = (0..n)
            .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
            .map(|(x, y)| diff[x * n + y])
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            n,
            diff,
            kstar,
            zero_order,
            ext_diff,
            ext_kstar,
            loc_coefficient: local_coefficient(k),
            gamma: k.gamma,
            min_offdiag_diff,
        })
    }

    pub fn diff_at(&self, x: usize, y: usize) -> f64 {
        self.diff[x * self.n + y]
    }

    pub fn kstar_at(&self, x: usize, y: usize) -> f64 {
        self.kstar[x * self.n + y]
    }
}

/// One edge of the local correction: `weight * (w[a] - w[b])^2`, with
/// `b = None` standing for a neighbour whose value is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEdge {
    pub a: usize,
    pub b: Option<usize>,
    pub weight: f64,
}

/// Forward-difference edges of every interior node towards `s + h` and
/// `t + h`; neighbours on the cone or outside `B_R` count as zero.
pub fn local_edges(grid: &Grid, table: &KernelTable) -> Vec<LocalEdge> {
    let scale = table.loc_coefficient * grid.h.powf(-2.0 * table.gamma);
    let mut edges = Vec::with_capacity(2 * grid.n_interior);
    if scale == 0.0 {
        return edges;
    }
    for a in grid.interior() {
        let (i, j) = grid.cells[a];
        let weight = scale * grid.weights[a];
        for (ni, nj) in [(i + 1, j), (i, j + 1)] {
            let b = if nj >= ni {
                None
            } else {
                grid.index_of(ni, nj).filter(|&b| b < grid.n_interior)
            };
            edges.push(LocalEdge { a, b, weight });
        }
    }
    edges
}

fn local_energy(values: &[f64], edges: &[LocalEdge], in_a: &[bool]) -> f64 {
    edges
        .iter()
        .filter(|e| in_a[e.a])
        .map(|e| {
            let d = values[e.a] - e.b.map_or(0.0, |b| values[b]);
            e.weight * d * d
        })
        .sum()
}

/// Odd energy `E(w, B_S)` split into inside-inside, inside-outside and
/// potential parts.
pub fn total_energy(
    profile: &OddProfile,
    s: f64,
    grid: &Grid,
    table: &KernelTable,
    pot: Potential,
) -> Result<EnergyBreakdown> {
    profile.check(grid)?;
    if table.n != grid.n_interior {
        return Err(Error::Dimension { expected: grid.n_interior, got: table.n });
    }
    if !(s > 0.0) || s > grid.r_out {
        return Err(Error::Domain(format!("evaluation radius S = {s} must lie in (0, R_out = {}]", grid.r_out)));
    }
    let n = grid.n_interior;
    let w = &profile.values;
    let wt = &grid.weights;
    let in_a: Vec<bool> = (0..n).map(|x| grid.nodes[x].norm() < s).collect();
    let edges = local_edges(grid, table);
    let parts: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let row_d = &table.diff[x * n..(x + 1) * n];
            let row_k = &table.kstar[x * n..(x + 1) * n];
            if in_a[x] {
                let mut inside = 0.0;
                let mut outside = 0.0;
                let mut kstar_in = 0.0;
                for y in 0..n {
                    let dw = w[x] - w[y];
                    let d = dw * dw * row_d[y] * wt[y];
                    if in_a[y] {
                        inside += 0.5 * d;
                        kstar_in += row_k[y] * wt[y];
                    } else {
                        outside += d;
                    }
                }
                let wx2 = w[x] * w[x];
                outside += wx2 * table.ext_diff[x];
                let in_in = (inside + 2.0 * wx2 * kstar_in) * wt[x];
                let in_out = (outside + 2.0 * wx2 * (table.zero_order[x] - kstar_in)) * wt[x];
                (in_in, in_out)
            } else {
                // Nodes of A^c contribute 2 w_y^2 sum_{x in A} Kbar(x, y*) w_x w_y.
                let mut acc = 0.0;
                for y in 0..n {
                    if in_a[y] {
                        acc += row_k[y] * wt[y];
                    }
                }
                (0.0, 2.0 * w[x] * w[x] * acc * wt[x])
            }
        })
        .collect();
    let mut in_in: f64 = parts.iter().map(|p| p.0).sum();
    let in_out: f64 = parts.iter().map(|p| p.1).sum();
    in_in += local_energy(w, &edges, &in_a);
    let mut potential: f64 = (0..n).filter(|&x| in_a[x]).map(|x| pot.g(w[x]) * wt[x]).sum();
    let g0 = pot.g(0.0);
    potential += g0
        * (n..grid.nodes.len())
            .filter(|&y| grid.nodes[y].norm() < s)
            .map(|y| wt[y])
            .sum::<f64>();
    potential += g0 * grid.cone_cells.iter().filter(|(p, _)| p.norm() < s).map(|(_, w)| w).sum::<f64>();
    potential *= 2.0;
    Ok(EnergyBreakdown {
        kinetic_in_in: in_in,
        kinetic_in_out: in_out,
        potential,
        total: in_in + in_out + potential,
        s,
        h: grid.h,
        r: grid.r,
    })
}

/// Sign rearrangement `|w|` followed by the clamp `min{1, .}`.
pub fn truncate_profile(profile: &OddProfile) -> OddProfile {
    OddProfile { values: profile.values.iter().map(|v| v.abs().min(1.0)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_example_m1() {
        let g = Grid::new(4.0, 1.0, 1, 6.0).unwrap();
        assert!(g.weights.iter().all(|&w| (w - 4.0).abs() < 1e-14));
        assert!(g.nodes.iter().all(|p| p.t < p.s - 0.5 + 1e-12));
        let mut interior: Vec<(f64, f64)> = g.nodes[..g.n_interior].iter().map(|p| (p.s, p.t)).collect();
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = Vec::new();
        for i in 0..6 {
            for j in 0..i {
                let (s, t) = (i as f64 + 0.5, j as f64 + 0.5);
                if s.hypot(t) < 4.0 {
                    expected.push((s, t));
                }
            }
        }
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(interior, expected);
        assert!(Grid::new(4.0, 4.0, 1, 6.0).is_err());
        assert!(Grid::new(4.0, 1.0, 1, 3.0).is_err());
    }

    #[test]
    fn grid_weight_m2() {
        let g = Grid::new(4.0, 0.5, 2, 6.0).unwrap();
        let k = g.index_of(4, 0).unwrap();
        assert_eq!((g.nodes[k].s, g.nodes[k].t), (2.25, 0.25));
        let (i, j) = (4, 0);
        assert_eq!(g.cells[k], (i, j));
        let w = (2.0 * PI).powi(2) * 2.25 * 0.25 * 0.25;
        assert_relative_eq!(g.weights[k], w, max_relative = 1e-14);
        let k = g.index_of(5, 1).unwrap();
        assert_relative_eq!(g.weights[k], (2.0 * PI).powi(2) * 2.75 * 0.75 * 0.25, max_relative = 1e-14);
    }

    #[test]
    fn outer_volume_is_half_ball() {
        // |B_S| = pi S^2 in the plane; the region s > t inside B_S is a quarter of it.
        let g = Grid::new(8.0, 0.05, 1, 9.0).unwrap();
        assert_relative_eq!(2.0 * g.outer_volume(5.0), PI * 25.0, max_relative = 5e-3);
    }

    #[test]
    fn potential_examples() {
        let p = Potential::AllenCahn;
        assert_eq!(p.g(1.0), 0.0);
        assert_eq!(p.g(-1.0), 0.0);
        assert_eq!(p.g(0.0), 0.25);
        assert_relative_eq!(p.f(0.5), 0.375);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let sup = grid.iter().map(|&u| p.f(u).abs()).fold(0.0, f64::max);
        assert_relative_eq!(sup, p.sup_f(), max_relative = 1e-5);
    }

    #[test]
    fn truncation_examples() {
        let t = truncate_profile(&OddProfile { values: vec![-0.3, 1.5, 0.7] });
        assert_eq!(t.values, vec![0.3, 1.0, 0.7]);
    }

    fn two_point_table() -> PairTable {
        let k = RadialKernel::fractional(1, 0.5, 1.0).unwrap();
        let rule = QuadratureRule::new(1, DEFAULT_ORDER).unwrap();
        let h: f64 = 0.5;
        let pts = vec![DoublyRadialPoint { s: 2.0, t: 1.0 }, DoublyRadialPoint { s: 3.0, t: 1.0 }];
        PairTable::build(&k, pts, vec![4.0 * h * h; 2], &rule).unwrap()
    }

    #[test]
    fn single_pair_interaction() {
        let t = two_point_table();
        let w = [1.0, 0.0];
        let ww = (4.0 * 0.25f64).powi(2);
        let expected = 2.0 * 0.242701 * ww + 4.0 * (0.133043 / 4.0) * ww;
        let got = interaction(&w, &[0], &[1], &t).unwrap();
        assert!((got - expected).abs() < 1e-5, "{got} vs {expected}");
        assert_relative_eq!(got, interaction(&w, &[1], &[0], &t).unwrap(), max_relative = 1e-14);
        assert_eq!(interaction(&[0.0, 0.0], &[0, 1], &[0, 1], &t).unwrap(), 0.0);
        assert!(interaction(&w, &[0], &[2], &t).is_err());
    }

    #[test]
    fn local_moment_reference_values() {
        // g -> 0 reduces the moment to (int (1-|z|))^2 = 1.
        assert_relative_eq!(self_cell_moment(1e-9), 1.0, max_relative = 1e-7);
        // Polar check for g = 1/2 with an independent one-dimensional rule.
        let g = 0.5;
        let polar = 8.0
            * integrate_adaptive(
                |phi: f64| {
                    let rmax = 1.0 / phi.cos();
                    let (c, s) = (phi.cos(), phi.sin());
                    integrate_adaptive(|r: f64| r.powf(1.0 - 2.0 * g) * (1.0 - r * c) * (1.0 - r * s), 0.0, rmax, &[], 1e-12, 0.0, 100)
                        .value
                },
                0.0,
                PI / 4.0,
                &[],
                1e-12,
                0.0,
                100,
            )
            .value;
        assert_relative_eq!(self_cell_moment(g), polar, max_relative = 1e-8);
    }
}
