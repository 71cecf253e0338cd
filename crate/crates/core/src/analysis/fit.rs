//! Least-squares power-law fits on log-log data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
}

impl LinearFit {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 3 {
            return Err(Error::InvalidData(format!("need at least 3 paired samples, got {} and {}", xs.len(), ys.len())));
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite sample".into()));
        }
        let nf = n as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = ys.iter().sum::<f64>() / nf;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidData("abscissae are all equal".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let s2 = sse / (nf - 2.0);
        let slope_stderr = (s2 / sxx).sqrt();
        let intercept_stderr = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
        let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
        Ok(Self { slope, intercept, slope_stderr, intercept_stderr, r_squared })
    }
}

/// Result of fitting `y = prefactor * x^(-exponent)` style laws in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub exponent_stderr: f64,
    pub prefactor_stderr: f64,
    pub r_squared: f64,
    /// The `(x, y)` pairs that entered the fit, before taking logs.
    pub points: Vec<(f64, f64)>,
}

/// Fits `y = prefactor * x^exponent`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidData("power-law fit needs positive data".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let f = LinearFit::new(&xs, &ys)?;
    let prefactor = f.intercept.exp();
    Ok(ScalingFit {
        exponent: f.slope,
        prefactor,
        exponent_stderr: f.slope_stderr,
        prefactor_stderr: prefactor * f.intercept_stderr,
        r_squared: f.r_squared,
        points: points.to_vec(),
    })
}

fn require_points(n: usize) -> Result<()> {
    if n < 5 {
        return Err(Error::InvalidData(format!("scaling fits need at least 5 points, got {n}")));
    }
    Ok(())
}

/// Fits `kappa |z_c - z_N|^nu = 1/N` to `(N, z_N)` pairs.
///
/// Returns `exponent = nu` and `prefactor = kappa`; the stored points are
/// `(|z_c - z_N|, N)`.
pub fn fit_nu(points: &[(u32, f64)], z_c: f64) -> Result<ScalingFit> {
    require_points(points.len())?;
    if let Some(&(n, z)) = points.iter().find(|&&(_, z)| !(z < z_c)) {
        return Err(Error::InvalidData(format!("z_N = {z} at N = {n} is not below z_c = {z_c}")));
    }
    let data: Vec<(f64, f64)> = points.iter().map(|&(n, z)| (z_c - z, n as f64)).collect();
    let f = fit_power_law(&data)?;
    // N = (1/kappa) |dz|^(-nu)
    let kappa = 1.0 / f.prefactor;
    Ok(ScalingFit {
        exponent: -f.exponent,
        prefactor: kappa,
        exponent_stderr: f.exponent_stderr,
        prefactor_stderr: kappa * f.prefactor_stderr / f.prefactor,
        ..f
    })
}

/// Fits `gap_min / N = gamma N^(-zeta)` to `(N, gap_min)` pairs.
///
/// Returns `exponent = zeta` and `prefactor = gamma`; the stored points are
/// `(N, gap_min / N)`.
pub fn fit_zeta(points: &[(u32, f64)]) -> Result<ScalingFit> {
    require_points(points.len())?;
    if let Some(&(n, g)) = points.iter().find(|&&(_, g)| !(g > 0.0)) {
        return Err(Error::InvalidData(format!("non-positive gap {g} at N = {n}")));
    }
    let data: Vec<(f64, f64)> = points.iter().map(|&(n, g)| (n as f64, g / n as f64)).collect();
    let f = fit_power_law(&data)?;
    Ok(ScalingFit { exponent: -f.exponent, ..f })
}
