//! Adiabatic loops in `phi` and the accumulated geometric phase.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::canonical::{hamilton_rhs, CanonicalState, COORDINATE_FLOOR};
use super::integrator::{integrate, StepControl};
use super::{eom_cartesian, from_array, to_array};
use crate::error::{Error, Result};
use crate::meanfield::{ground_state_analytic, ground_state_numeric, GroundSolution, MeanFieldState, NumericOptions};
use crate::params::Couplings;

/// Norm drift that aborts an integration.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Time dependence of the coupling phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseRamp {
    Static(f64),
    /// `phi(t) = phi0 + 2 pi t / period`
    Linear { phi0: f64, period: f64 },
}

impl PhaseRamp {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            PhaseRamp::Static(phi) => phi,
            PhaseRamp::Linear { phi0, period } => phi0 + TAU * t / period,
        }
    }
}

fn couplings_at(c: &Couplings, ramp: &PhaseRamp, t: f64) -> Couplings {
    Couplings { phi: ramp.at(t), ..*c }
}

/// Integrates the amplitude equations from `t0` to `t1`.
///
/// `on_step(t_old, y_old, t_new, y_new)` sees every accepted step.
pub fn evolve<O>(
    state: &MeanFieldState,
    c: &Couplings,
    ramp: PhaseRamp,
    t0: f64,
    t1: f64,
    stops: &[f64],
    ctl: &StepControl,
    mut on_step: O,
) -> Result<MeanFieldState>
where
    O: FnMut(f64, &MeanFieldState, f64, &MeanFieldState) -> Result<()>,
{
    let f = |t: f64, y: &[Complex64; 3]| to_array(&eom_cartesian(&from_array(y), &couplings_at(c, &ramp, t)));
    let y = integrate(f, t0, to_array(state), t1, stops, ctl, |ta, ya, tb, yb| {
        on_step(ta, &from_array(ya), tb, &from_array(yb))
    })?;
    Ok(from_array(&y))
}

/// Integrates the canonical equations from `t0` to `t1`; `lambda` comes out unwrapped.
pub fn evolve_canonical(
    state: &CanonicalState,
    c: &Couplings,
    ramp: PhaseRamp,
    t0: f64,
    t1: f64,
    ctl: &StepControl,
) -> Result<CanonicalState> {
    let failure = RefCell::new(None);
    let f = |t: f64, y: &[f64; 5]| match hamilton_rhs(&CanonicalState::from_array(y), &couplings_at(c, &ramp, t)) {
        Ok(r) => [r.dp1, r.dq1, r.dp2, r.dq2, r.dlambda],
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            [f64::NAN; 5]
        }
    };
    let y = integrate(f, t0, state.to_array(), t1, &[], ctl, |_, _, _, _| match failure.borrow_mut().take() {
        Some(e) => Err(e),
        None => Ok(()),
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(CanonicalState::from_array(&y?))
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Geometric phase from the Berry formula applied to the linearized
/// fluctuations: `(pi/6)(2 + z^2/rho^2)`, defined for `0 <= z <= 2 rho`.
pub fn berry_phase_linearized(z: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !(0.0..=2.0 * rho).contains(&z) {
        return Err(Error::InvalidParameter(format!("linearized Berry phase needs 0 <= z <= 2 rho, got z = {z}, rho = {rho}")));
    }
    Ok(PI / 6.0 * (2.0 + z * z / (rho * rho)))
}

/// Ground fixed point `(p1, p2)` of the mixed phase at `delta = 0`.
fn fixed_point(z: f64, rho: f64) -> (f64, f64) {
    let r2 = rho * rho;
    (z * z / (16.0 * r2), (z * z + 8.0 * r2) / (48.0 * r2))
}

/// `mu_0 = -2 z sqrt(p1 p2) - 3 rho sqrt(p2) (1 - 2 (p1 + p2))` at a fixed point.
pub fn fixed_point_chemical_potential(p1: f64, p2: f64, z: f64, rho: f64) -> f64 {
    -2.0 * z * (p1 * p2).sqrt() - 3.0 * rho * p2.sqrt() * (1.0 - 2.0 * (p1 + p2))
}

/// First-order shift of `p2` driven by a slow ramp `phi_dot` (mixed phase, `delta = 0`).
pub fn delta_p2_reference(z: f64, rho: f64, phi_dot: f64) -> f64 {
    let (p1, p2) = fixed_point(z, rho);
    let s1 = p1.sqrt();
    2.0 * p2.sqrt() * (z * p2 + z * p1 - 4.0 * rho * p1 * s1)
        / (rho * (z * (1.0 + 6.0 * p2 + 6.0 * p1) - 16.0 * rho * p1 * s1))
        * phi_dot
}

/// First-order correction to `dlambda/dt` for a slow ramp `phi_dot`.
pub fn lambda1_reference(z: f64, rho: f64, phi_dot: f64) -> f64 {
    let (p1, p2) = fixed_point(z, rho);
    let dp2 = delta_p2_reference(z, rho, phi_dot);
    (-2.0 * p2 * p1.sqrt() * z + rho * (p2 * (6.0 * p2 + 6.0 * p1 - 1.0) + dp2)) / p2.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopOptions {
    pub control: StepControl,
    /// Number of evenly spaced trajectory samples (0 disables sampling).
    pub samples: usize,
}

/// Loop tolerances: norm drift grows linearly in the period, and these keep
/// it below `1e-8` for periods up to a few thousand.
pub const LOOP_RTOL: f64 = 1e-12;
pub const LOOP_ATOL: f64 = 1e-14;

impl Default for LoopOptions {
    fn default() -> Self {
        Self { control: StepControl { rtol: LOOP_RTOL, atol: LOOP_ATOL, ..StepControl::default() }, samples: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub phi: f64,
    pub state: MeanFieldState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopResult {
    pub period: f64,
    pub mu0: f64,
    pub lambda_total: f64,
    /// `-mu0 * period`
    pub lambda_dynamic: f64,
    /// `lambda_total - lambda_dynamic` reduced to `(-pi, pi]`.
    pub lambda_g: f64,
    /// Time average of `|b_g|^2` over the loop.
    pub mean_p1: f64,
    pub max_norm_drift: f64,
    pub final_state: MeanFieldState,
    pub trajectory: Vec<TrajectorySample>,
}

fn initial_ground(c: &Couplings) -> Result<GroundSolution> {
    if c.delta == 0.0 {
        ground_state_analytic(c.z, c.rho, c.phi)
    } else {
        ground_state_numeric(c, &NumericOptions::default())
    }
}

/// Phase increment of `lambda` over one step.
fn lambda_increment(old: &MeanFieldState, new: &MeanFieldState, t: f64) -> Result<f64> {
    let (d, scale) = if old.a.norm_sqr() > COORDINATE_FLOOR && new.a.norm_sqr() > COORDINATE_FLOOR {
        ((new.a * old.a.conj()).arg(), 1.0)
    } else {
        ((new.b_g * old.b_g.conj()).arg(), 0.5)
    };
    if d.abs() >= PI / 2.0 {
        return Err(Error::StepSize { t, jump: d });
    }
    Ok(scale * d)
}

/// Starts at the ground state for `c` and carries it once around
/// `phi -> phi + 2 pi` in time `period`.
pub fn integrate_loop(c: &Couplings, period: f64, opts: &LoopOptions) -> Result<LoopResult> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameter(format!("loop period must be positive, got {period}")));
    }
    let ground = initial_ground(c)?;
    let ramp = PhaseRamp::Linear { phi0: c.phi, period };
    let stops: Vec<f64> = (1..=opts.samples).map(|k| period * k as f64 / opts.samples as f64).collect();

    let mut trajectory = Vec::with_capacity(opts.samples + 1);
    if opts.samples > 0 {
        trajectory.push(TrajectorySample { t: 0.0, phi: ramp.at(0.0), state: ground.state });
    }
    let mut lambda = 0.0;
    let mut p1_area = 0.0;
    let mut max_drift = (ground.state.norm() - 1.0).abs();
    let mut next_stop = 0;

    let final_state = evolve(&ground.state, c, ramp, 0.0, period, &stops, &opts.control, |ta, ya, tb, yb| {
        lambda += lambda_increment(ya, yb, tb)?;
        p1_area += 0.5 * (tb - ta) * (ya.b_g.norm_sqr() + yb.b_g.norm_sqr());
        let drift = (yb.norm() - 1.0).abs();
        max_drift = max_drift.max(drift);
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::IntegrationFailure { t: tb, reason: format!("norm drifted by {drift:e}") });
        }
        if next_stop < stops.len() && tb == stops[next_stop] {
            trajectory.push(TrajectorySample { t: tb, phi: ramp.at(tb), state: *yb });
            next_stop += 1;
        }
        Ok(())
    })?;

    let lambda_dynamic = -ground.mu * period;
    Ok(LoopResult {
        period,
        mu0: ground.mu,
        lambda_total: lambda,
        lambda_dynamic,
        lambda_g: wrap_phase(lambda - lambda_dynamic),
        mean_p1: p1_area / period,
        max_norm_drift: max_drift,
        final_state,
        trajectory,
    })
}
