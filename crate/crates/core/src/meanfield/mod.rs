//! Mean-field (`N -> infinity`) description.
//!
//! Amplitudes `(a, b_g, b_e)` obey `|a|^2 + 2 (|b_g|^2 + |b_e|^2) = 1` and the
//! classical energy
//!
//! ```text
//! E = delta (|b_e|^2 + |b_g|^2) + 2 z Re(b_e^* b_g) + 2 rho Re(e^{-i phi} b_e^* a^2).
//! ```
//!
//! Stationary states solve the nonlinear eigenproblem
//! `H_mf(a) psi = diag(mu, 2 mu, 2 mu) psi` with chemical potential `mu`.
//! All energies are in units of `rho`.

mod numeric;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Couplings;

pub use numeric::{ground_state_numeric, NumericOptions};

/// Largest normalization defect accepted by routines that assume a
/// normalized state.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub b_g: Complex64,
    pub b_e: Complex64,
}

impl MeanFieldState {
    pub fn new(a: Complex64, b_g: Complex64, b_e: Complex64) -> Self {
        Self { a, b_g, b_e }
    }

    pub fn real(a: f64, b_g: f64, b_e: f64) -> Self {
        Self::new(a.into(), b_g.into(), b_e.into())
    }

    /// `|a|^2 + 2 (|b_g|^2 + |b_e|^2)`.
    pub fn norm(&self) -> f64 {
        self.a.norm_sqr() + 2.0 * (self.b_g.norm_sqr() + self.b_e.norm_sqr())
    }

    /// Rescales onto the normalization surface.
    pub fn normalized(&self) -> Self {
        let s = self.norm().sqrt();
        Self::new(self.a / s, self.b_g / s, self.b_e / s)
    }

    pub fn atomic_population(&self) -> f64 {
        self.a.norm_sqr()
    }

    /// Gauge rotation `diag(e^{i theta}, e^{2 i theta}, e^{2 i theta})`.
    pub fn gauge(&self, theta: f64) -> Self {
        let u1 = Complex64::from_polar(1.0, theta);
        let u2 = Complex64::from_polar(1.0, 2.0 * theta);
        Self::new(self.a * u1, self.b_g * u2, self.b_e * u2)
    }

    pub fn as_vector(&self) -> Vector3<Complex64> {
        Vector3::new(self.a, self.b_g, self.b_e)
    }

    pub fn from_vector(v: &Vector3<Complex64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    fn check_normalized(&self) -> Result<()> {
        let defect = (self.norm() - 1.0).abs();
        if defect > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "state is not normalized (|a|^2 + 2(|b_g|^2 + |b_e|^2) - 1 = {defect:.3e})"
            )));
        }
        Ok(())
    }
}

/// Stationary mean-field ground state with its chemical potential and
/// classical energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundSolution {
    pub state: MeanFieldState,
    pub mu: f64,
    pub energy: f64,
}

impl GroundSolution {
    fn from_state(state: MeanFieldState, c: &Couplings) -> Result<Self> {
        Ok(Self { state, mu: chemical_potential(&state, c), energy: classical_energy(&state, c)? })
    }
}

/// The state-dependent mean-field matrix `H_mf(a)`.
pub fn mean_field_matrix(state: &MeanFieldState, c: &Couplings) -> Matrix3<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let delta = Complex64::new(c.delta, 0.0);
    let z = Complex64::new(c.z, 0.0);
    let up = Complex64::from_polar(c.rho, c.phi);
    let down = Complex64::from_polar(c.rho, -c.phi);
    Matrix3::new(
        zero, zero, up * 2.0 * state.a.conj(),
        zero, delta, z,
        down * state.a, z, delta,
    )
}

/// `mu = <psi| H_mf |psi>` (real part) for a normalized state, i.e. the
/// least-squares eigenvalue of `H_mf psi = Theta(mu) psi`.
pub fn chemical_potential(state: &MeanFieldState, c: &Couplings) -> f64 {
    let psi = state.as_vector();
    let h_psi = mean_field_matrix(state, c) * psi;
    psi.dotc(&h_psi).re / state.norm()
}

/// `|H_mf psi - Theta(mu) psi|` with `Theta(mu) = diag(mu, 2 mu, 2 mu)`.
pub fn eigen_residual(state: &MeanFieldState, mu: f64, c: &Couplings) -> f64 {
    let psi = state.as_vector();
    let theta = Vector3::new(mu, 2.0 * mu, 2.0 * mu).map(|x| Complex64::new(x, 0.0));
    (mean_field_matrix(state, c) * psi - psi.component_mul(&theta)).norm()
}

/// Classical energy of a normalized state.
pub fn classical_energy(state: &MeanFieldState, c: &Couplings) -> Result<f64> {
    state.check_normalized()?;
    Ok(classical_energy_unchecked(state, c))
}

pub(crate) fn classical_energy_unchecked(s: &MeanFieldState, c: &Couplings) -> f64 {
    let conv = Complex64::from_polar(1.0, -c.phi) * s.b_e.conj() * s.a * s.a;
    c.delta * (s.b_e.norm_sqr() + s.b_g.norm_sqr())
        + 2.0 * c.z * (s.b_e.conj() * s.b_g).re
        + 2.0 * c.rho * conv.re
}

/// Critical coupling `z_c = 2 rho + delta`.
pub fn critical_point(rho: f64, delta: f64) -> f64 {
    2.0 * rho + delta
}

/// Closed-form ground state at `delta = 0`.
///
/// Below `z = 2 rho` the ground state is an atom-molecule mixture with
/// `|a|^2 = (4 - z^2/rho^2) / 6` and `mu = -sqrt(z^2 + 8 rho^2) / (2 sqrt 3)`;
/// from `z = 2 rho` on it is the pure molecular state `(0, 1/2, -1/2)` with
/// `mu = -z/2`. The two branches meet continuously at `z = 2 rho`.
pub fn ground_state_analytic(z: f64, rho: f64, phi: f64) -> Result<GroundSolution> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("z must be non-negative and finite, got {z}")));
    }
    let c = Couplings::new(0.0, z, rho, phi)?;
    let (state, mu) = if z >= 2.0 * rho {
        (MeanFieldState::real(0.0, 0.5, -0.5), -z / 2.0)
    } else {
        let root = (z * z + 8.0 * rho * rho).sqrt();
        let a = ((4.0 - z * z / (rho * rho)) / 6.0).max(0.0).sqrt();
        let rot = Complex64::from_polar(1.0, -c.phi);
        let b_g = rot * (z / (4.0 * rho));
        let b_e = -rot * (root / (4.0 * 3f64.sqrt() * rho));
        (MeanFieldState::new(a.into(), b_g, b_e), -root / (2.0 * 3f64.sqrt()))
    };
    Ok(GroundSolution { state, mu, energy: classical_energy_unchecked(&state, &c) })
}

/// Near-critical expansion of `|a|^2` at `delta = 0`, `rho = 1`:
/// `(4 - z_c (2 z - z_c)) / 6`.
pub fn s0_asymptotic(z: f64, z_c: f64) -> f64 {
    (4.0 - z_c * (2.0 * z - z_c)) / 6.0
}

/// One row of an energy-derivative profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativePoint {
    pub z: f64,
    pub solution: GroundSolution,
    pub d_energy: f64,
    pub d2_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeProfile {
    pub step: f64,
    pub points: Vec<DerivativePoint>,
    /// Grid cell `[z_i, z_{i+1}]` across which the second derivative
    /// changes most.
    pub discontinuity: (f64, f64),
}

impl DerivativeProfile {
    pub fn discontinuity_midpoint(&self) -> f64 {
        0.5 * (self.discontinuity.0 + self.discontinuity.1)
    }
}

/// Ground energy and its first two `z` derivatives (central differences
/// with step `h`) on a uniform grid.
pub fn energy_derivative_profile(z_grid: &[f64], c: &Couplings, h: f64) -> Result<DerivativeProfile> {
    if z_grid.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "derivative profile needs at least 5 grid points, got {}",
            z_grid.len()
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    let spacing = z_grid[1] - z_grid[0];
    if !(spacing > 0.0)
        || z_grid.windows(2).any(|w| ((w[1] - w[0]) - spacing).abs() > 1e-9 * spacing.abs().max(1.0))
    {
        return Err(Error::InvalidParameter("z grid must be uniform and ascending".into()));
    }
    let energy = |z: f64| -> Result<f64> { Ok(ground_state_numeric(&c.with_z(z)?, &NumericOptions::default())?.energy) };

    let mut points = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let solution = ground_state_numeric(&c.with_z(z)?, &NumericOptions::default())?;
        let (lo, hi) = (energy(z - h)?, energy(z + h)?);
        points.push(DerivativePoint {
            z,
            solution,
            d_energy: (hi - lo) / (2.0 * h),
            d2_energy: (hi - 2.0 * solution.energy + lo) / (h * h),
        });
    }
    let cell = points
        .windows(2)
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let ja = (a[1].d2_energy - a[0].d2_energy).abs();
            let jb = (b[1].d2_energy - b[0].d2_energy).abs();
            ja.total_cmp(&jb)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(DerivativeProfile { step: h, discontinuity: (points[cell].z, points[cell + 1].z), points })
}

/// Uniform grid of `steps` points on `[min, max]`.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![min],
        _ => (0..steps).map(|i| min + (max - min) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_mixture_at_unit_coupling() {
        let g = ground_state_analytic(1.0, 1.0, 0.0).unwrap();
        assert!((g.state.a.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((g.state.b_g.norm_sqr() - 1.0 / 16.0).abs() < 1e-15);
        assert!((g.state.b_e.norm_sqr() - 3.0 / 16.0).abs() < 1e-15);
        assert!((g.mu + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((g.energy + 3.0 * 3f64.sqrt() / 8.0).abs() < 1e-15);
        let c = Couplings::resonant(1.0, 1.0).unwrap();
        assert!(eigen_residual(&g.state, g.mu, &c) < 1e-15);
    }

    #[test]
    fn analytic_pure_molecule_branch() {
        let g = ground_state_analytic(3.0, 1.0, 0.0).unwrap();
        assert_eq!(g.state, MeanFieldState::real(0.0, 0.5, -0.5));
        assert_eq!(g.mu, -1.5);
        assert!((g.energy + 1.5).abs() < 1e-15);
    }

    #[test]
    fn branches_meet_at_two_rho() {
        let at = ground_state_analytic(2.0, 1.0, 0.0).unwrap();
        let below = ground_state_analytic(2.0 - 1e-13, 1.0, 0.0).unwrap();
        assert!((at.mu + 1.0).abs() < 1e-12 && (below.mu + 1.0).abs() < 1e-12);
        assert!((at.energy + 1.0).abs() < 1e-12 && (below.energy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_z_rejected() {
        assert!(matches!(ground_state_analytic(-0.1, 1.0, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn energy_matches_mu_relation() {
        // E = mu + rho |b_e| |a|^2 at the mixture fixed point
        let c = Couplings::new(0.0, 1.3, 1.0, 0.7).unwrap();
        let g = ground_state_analytic(1.3, 1.0, 0.7).unwrap();
        let rhs = g.mu + c.rho * g.state.b_e.norm() * g.state.a.norm_sqr();
        assert!((g.energy - rhs).abs() < 1e-14);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let c = Couplings::resonant(1.0, 1.0).unwrap();
        assert!(classical_energy(&MeanFieldState::real(1.0, 0.5, 0.0), &c).is_err());
    }

    #[test]
    fn critical_points() {
        assert_eq!(critical_point(1.0, 0.0), 2.0);
        assert_eq!(critical_point(1.0, 0.5), 2.5);
        assert_eq!(critical_point(2.0, 0.0), 4.0);
    }

    #[test]
    fn asymptotic_atomic_population() {
        assert_eq!(s0_asymptotic(2.0, 2.0), 0.0);
        assert!((s0_asymptotic(1.9, 2.0) - 0.4 / 6.0).abs() < 1e-15);
        let slope = (s0_asymptotic(2.0 + 1e-6, 2.0) - s0_asymptotic(2.0 - 1e-6, 2.0)) / 2e-6;
        assert!((slope + 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn gauge_preserves_energy_and_mu() {
        let c = Couplings::new(0.0, 0.8, 1.0, 0.3).unwrap();
        let g = ground_state_analytic(0.8, 1.0, 0.3).unwrap();
        let rotated = g.state.gauge(PI / 5.0);
        assert!((classical_energy(&rotated, &c).unwrap() - g.energy).abs() < 1e-15);
        assert!((chemical_potential(&rotated, &c) - g.mu).abs() < 1e-15);
        assert!(eigen_residual(&rotated, g.mu, &c) < 1e-15);
    }

    #[test]
    fn profile_rejects_short_grid() {
        let c = Couplings::resonant(1.0, 1.0).unwrap();
        assert!(energy_derivative_profile(&[1.0, 1.1, 1.2, 1.3], &c, 1e-3).is_err());
    }
}
