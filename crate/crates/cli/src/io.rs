//! CSV and JSON artifacts.

use anyhow::{bail, Context};
use saddle_core::energy::{Grid, OddProfile};
use saddle_core::experiments::ScanRow;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Deserialize)]
struct KernelRow {
    r: f64,
    k: f64,
}

/// Reads `(r, K(r))` samples from a CSV with header `r,k`.
pub fn read_kernel_table(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("cannot read kernel table {}", path.display()))?;
    let mut r = Vec::new();
    let mut k = Vec::new();
    for row in rd.deserialize() {
        let row: KernelRow = row.with_context(|| format!("bad row in {}", path.display()))?;
        r.push(row.r);
        k.push(row.k);
    }
    Ok((r, k))
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    s: f64,
    t: f64,
    u: f64,
}

/// Profile values at the interior cell centres, header `s,t,u`.
pub fn write_profile(path: &Path, grid: &Grid, profile: &OddProfile) -> anyhow::Result<()> {
    let mut wr = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for (p, &u) in grid.nodes[..grid.n_interior].iter().zip(&profile.values) {
        wr.serialize(ProfileRow { s: p.s, t: p.t, u })?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a profile written by [`write_profile`] for the same grid.
pub fn read_profile(path: &Path, grid: &Grid) -> anyhow::Result<OddProfile> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("cannot read profile {}", path.display()))?;
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["s", "t", "u"] {
        bail!("profile {} must have header s,t,u", path.display());
    }
    let mut values = Vec::with_capacity(grid.n_interior);
    for (i, row) in rd.deserialize().enumerate() {
        let row: ProfileRow = row.with_context(|| format!("bad row {} in {}", i + 1, path.display()))?;
        let Some(p) = grid.nodes.get(i).filter(|_| i < grid.n_interior) else {
            bail!("profile {} has more rows than the grid has interior cells ({})", path.display(), grid.n_interior);
        };
        if (p.s - row.s).abs() > 1e-9 || (p.t - row.t).abs() > 1e-9 {
            bail!(
                "profile {} row {} is at ({}, {}) but the grid cell is at ({}, {}); was it written for another grid?",
                path.display(),
                i + 1,
                row.s,
                row.t,
                p.s,
                p.t
            );
        }
        values.push(row.u);
    }
    let profile = OddProfile { values };
    profile.check(grid)?;
    Ok(profile)
}

#[derive(Debug, Serialize)]
struct ScanCsvRow {
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "E_total")]
    e_total: f64,
    #[serde(rename = "E_kin")]
    e_kin: f64,
    #[serde(rename = "E_pot")]
    e_pot: f64,
}

pub fn write_scan(path: &Path, rows: &[ScanRow]) -> anyhow::Result<()> {
    let mut wr = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        wr.serialize(ScanCsvRow { s: r.s, e_total: r.e_total, e_kin: r.e_kin, e_pot: r.e_pot })?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SampleRow {
    pub s: f64,
    pub t: f64,
    pub sigma: f64,
    pub tau: f64,
    /// Relative gap; empty when both kernel values underflowed.
    pub gap: Option<f64>,
}

pub fn write_samples(path: &Path, rows: &[SampleRow]) -> anyhow::Result<()> {
    let mut wr = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip_checks_coordinates() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::with_default_buffer(4.0, 0.5, 1).unwrap();
        let profile = OddProfile::from_fn(&grid, |p| p.cone_distance().min(1.0));
        let path = dir.path().join("p.csv");
        write_profile(&path, &grid, &profile).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("s,t,u\n"));
        assert_eq!(read_profile(&path, &grid).unwrap(), profile);
        let other = Grid::with_default_buffer(4.0, 0.25, 1).unwrap();
        assert!(read_profile(&path, &other).is_err());
    }
}
