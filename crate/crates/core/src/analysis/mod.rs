//! Finite-size criticality: pseudo-critical points, minimum gaps, scaling
//! fits and ground-state fidelity sweeps.

mod fit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quantum::{fidelity, GroundSolver};

pub use fit::{fit_nu, fit_power_law, fit_zeta, LinearFit, ScalingFit};

/// Paper-style default atom numbers for scaling fits (log-spaced, even).
pub const DEFAULT_N_GRID: [u32; 8] = [100, 142, 200, 284, 400, 566, 800, 1132];

/// Even integers log-spaced over `[lo, hi]`, deduplicated and ascending.
pub fn log_spaced_even(lo: u32, hi: u32, count: usize) -> Vec<u32> {
    if count == 0 || lo > hi {
        return vec![];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u32> = (0..count)
        .map(|i| {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            let x = (a + t * (b - a)).exp();
            ((x / 2.0).round() as u32 * 2).max(2)
        })
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub n: u32,
    /// Pseudo-critical coupling.
    pub z_n: f64,
    /// Minimum of `(E1 - E0) / rho`.
    pub gap_min: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSearch {
    /// Points in the coarse scan.
    pub scan_points: usize,
    /// Final bracket width of the golden-section refinement.
    pub tolerance: f64,
}

impl Default for GapSearch {
    fn default() -> Self {
        Self { scan_points: 41, tolerance: 1e-6 }
    }
}

/// Minimum of the gap over `bracket` with the default search settings.
pub fn pseudo_critical_point(n: u32, delta: f64, rho: f64, bracket: (f64, f64)) -> Result<GapMinimum> {
    let mut solver = GroundSolver::new(n)?.with_warm_start(true);
    pseudo_critical_point_with(&mut solver, delta, rho, bracket, &GapSearch::default())
}

/// Coarse scan followed by golden-section refinement.
///
/// The scan must show a single descent followed by a single ascent; a
/// minimum on either end of the bracket is reported as [`Error::Bracket`].
pub fn pseudo_critical_point_with(
    solver: &mut GroundSolver,
    delta: f64,
    rho: f64,
    bracket: (f64, f64),
    search: &GapSearch,
) -> Result<GapMinimum> {
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid bracket [{lo}, {hi}]")));
    }
    if search.scan_points < 41 {
        return Err(Error::InvalidParameter(format!("coarse scan needs at least 41 points, got {}", search.scan_points)));
    }
    let n = solver.template().atom_number();
    let base = ModelParams::new(n, delta, lo, rho, 0.0)?;
    let mut evaluations = 0usize;
    let mut gap = |z: f64| -> Result<f64> {
        evaluations += 1;
        Ok(solver.solve(&base.with_z(z)?)?.gap)
    };

    let m = search.scan_points;
    let step = (hi - lo) / (m - 1) as f64;
    let zs: Vec<f64> = (0..m).map(|i| lo + step * i as f64).collect();
    let gaps = zs.iter().map(|&z| gap(z)).collect::<Result<Vec<_>>>()?;

    let best = (0..m).min_by(|&i, &j| gaps[i].total_cmp(&gaps[j])).unwrap();
    if best == 0 || best == m - 1 {
        return Err(Error::Bracket { z: zs[best] });
    }
    let turns = gaps.windows(3).filter(|w| w[1] < w[0] && w[1] <= w[2]).count();
    if turns != 1 {
        return Err(Error::InvalidData(format!("gap is not unimodal on [{lo}, {hi}] ({turns} local minima)")));
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (zs[best - 1], zs[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gap(c)?, gap(d)?);
    let (mut z_best, mut g_best) = (zs[best], gaps[best]);
    while b - a > search.tolerance {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap(d)?;
        }
    }
    for (z, g) in [(c, fc), (d, fd)] {
        if g < g_best {
            z_best = z;
            g_best = g;
        }
    }
    Ok(GapMinimum { n, z_n: z_best, gap_min: g_best, evaluations })
}

/// Gap minima for several atom numbers.
///
/// Each bracket after the first starts just below the previous pseudo-critical
/// point, since `z_N` grows with `N`.
pub fn gap_minima(ns: &[u32], delta: f64, rho: f64, first: (f64, f64), upper: f64) -> Result<Vec<GapMinimum>> {
    let mut out: Vec<GapMinimum> = Vec::with_capacity(ns.len());
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &n in &sorted {
        let bracket = match out.last() {
            Some(prev) => (prev.z_n - 0.1 * (upper - prev.z_n).max(0.05), upper),
            None => first,
        };
        let mut solver = GroundSolver::new(n)?.with_warm_start(true);
        out.push(pseudo_critical_point_with(&mut solver, delta, rho, bracket, &GapSearch::default())?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub z: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySweep {
    pub n: u32,
    pub alpha: f64,
    pub records: Vec<FidelityRecord>,
    pub z_min: f64,
    pub f_min: f64,
    /// Number of dips after ignoring changes below [`FIDELITY_DEADBAND`].
    pub local_minima: usize,
}

/// Changes in fidelity smaller than this are treated as flat.
pub const FIDELITY_DEADBAND: f64 = 1e-9;

fn count_dips(values: &[f64]) -> usize {
    let mut dips = 0;
    let mut falling = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d < -FIDELITY_DEADBAND {
            falling = true;
        } else if d > FIDELITY_DEADBAND {
            if falling {
                dips += 1;
            }
            falling = false;
        }
    }
    dips
}

/// `F(z) = |<ground(delta = 0, z) | ground(delta = alpha, z)>|` over `z_grid`.
pub fn fidelity_sweep(n: u32, alpha: f64, z_grid: &[f64], rho: f64) -> Result<FidelitySweep> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    if z_grid.is_empty() {
        return Err(Error::InvalidParameter("empty z grid".into()));
    }
    let mut grid = z_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut reference = GroundSolver::new(n)?.with_warm_start(true);
    let mut shifted = GroundSolver::new(n)?.with_warm_start(true);
    let mut records = Vec::with_capacity(grid.len());
    for &z in &grid {
        let v0 = reference.solve(&ModelParams::new(n, 0.0, z, rho, 0.0)?)?.ground_vector;
        let v1 = if alpha == 0.0 {
            v0.clone()
        } else {
            shifted.solve(&ModelParams::new(n, alpha, z, rho, 0.0)?)?.ground_vector
        };
        records.push(FidelityRecord { z, fidelity: fidelity(&v0, &v1)? });
    }
    let best = records.iter().min_by(|a, b| a.fidelity.total_cmp(&b.fidelity)).unwrap();
    let values: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    Ok(FidelitySweep {
        n,
        alpha,
        z_min: best.z,
        f_min: best.fidelity,
        local_minima: count_dips(&values),
        records,
    })
}
