//! Canonical coordinates `(p_1, q_1, p_2, q_2, lambda)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::MeanFieldState;
use crate::params::Couplings;

/// Smallest population for which the canonical equations are evaluated.
pub const COORDINATE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalState {
    /// `|b_g|^2`
    pub p1: f64,
    /// `arg(b_g) - 2 arg(a)`
    pub q1: f64,
    /// `|b_e|^2`
    pub p2: f64,
    /// `arg(b_e) - 2 arg(a)`
    pub q2: f64,
    /// Total phase `arg(a)`, unwrapped by the caller when integrated.
    pub lambda: f64,
}

impl CanonicalState {
    pub fn atomic_population(&self) -> f64 {
        1.0 - 2.0 * (self.p1 + self.p2)
    }

    pub(crate) fn to_array(self) -> [f64; 5] {
        [self.p1, self.q1, self.p2, self.q2, self.lambda]
    }

    pub(crate) fn from_array(y: &[f64; 5]) -> Self {
        Self { p1: y[0], q1: y[1], p2: y[2], q2: y[3], lambda: y[4] }
    }
}

/// Time derivatives of the canonical variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalRates {
    pub dp1: f64,
    pub dq1: f64,
    pub dp2: f64,
    pub dq2: f64,
    pub dlambda: f64,
}

pub fn canonical_from_amplitudes(s: &MeanFieldState) -> Result<CanonicalState> {
    if s.a.norm() == 0.0 {
        return Err(Error::SingularCoordinates("the atomic amplitude vanishes, so arg(a) is undefined".into()));
    }
    let lambda = s.a.arg();
    Ok(CanonicalState {
        p1: s.b_g.norm_sqr(),
        q1: s.b_g.arg() - 2.0 * lambda,
        p2: s.b_e.norm_sqr(),
        q2: s.b_e.arg() - 2.0 * lambda,
        lambda,
    })
}

pub fn amplitudes_from_canonical(c: &CanonicalState) -> Result<MeanFieldState> {
    let s = c.atomic_population();
    if c.p1 < 0.0 || c.p2 < 0.0 || s < -1e-15 {
        return Err(Error::InvalidParameter(format!(
            "populations out of range (p1 = {}, p2 = {}, |a|^2 = {s})",
            c.p1, c.p2
        )));
    }
    Ok(MeanFieldState::new(
        Complex64::from_polar(s.max(0.0).sqrt(), c.lambda),
        Complex64::from_polar(c.p1.sqrt(), 2.0 * c.lambda + c.q1),
        Complex64::from_polar(c.p2.sqrt(), 2.0 * c.lambda + c.q2),
    ))
}

/// `H = delta (p_1 + p_2) + 2 z sqrt(p_1 p_2) cos(q_1 - q_2) + 2 rho sqrt(p_2) (1 - 2 (p_1 + p_2)) cos(q_2 + phi)`.
pub fn canonical_energy(s: &CanonicalState, c: &Couplings) -> f64 {
    c.delta * (s.p1 + s.p2)
        + 2.0 * c.z * (s.p1 * s.p2).sqrt() * (s.q1 - s.q2).cos()
        + 2.0 * c.rho * s.p2.sqrt() * s.atomic_population() * (s.q2 + c.phi).cos()
}

/// Canonical equations of motion.
///
/// With `H` from [`canonical_energy`] and the amplitude equations as the
/// reference, the flow is `dp_i/dt = dH/dq_i`, `dq_i/dt = -dH/dp_i`, and
/// `dlambda/dt = -2 rho sqrt(p_2) cos(q_2 + phi)`.
pub fn hamilton_rhs(s: &CanonicalState, c: &Couplings) -> Result<CanonicalRates> {
    if s.p1 < COORDINATE_FLOOR || s.p2 < COORDINATE_FLOOR {
        return Err(Error::SingularCoordinates(format!(
            "molecular populations (p1 = {:e}, p2 = {:e}) below the floor {COORDINATE_FLOOR:e}",
            s.p1, s.p2
        )));
    }
    let (sp1, sp2) = (s.p1.sqrt(), s.p2.sqrt());
    let atoms = s.atomic_population();
    let (sin_rel, cos_rel) = (s.q1 - s.q2).sin_cos();
    let (sin_conv, cos_conv) = (s.q2 + c.phi).sin_cos();

    let dh_dq1 = -2.0 * c.z * sp1 * sp2 * sin_rel;
    let dh_dq2 = 2.0 * c.z * sp1 * sp2 * sin_rel - 2.0 * c.rho * sp2 * atoms * sin_conv;
    let dh_dp1 = c.delta + c.z * (sp2 / sp1) * cos_rel - 4.0 * c.rho * sp2 * cos_conv;
    let dh_dp2 = c.delta + c.z * (sp1 / sp2) * cos_rel + c.rho * atoms / sp2 * cos_conv - 4.0 * c.rho * sp2 * cos_conv;

    Ok(CanonicalRates {
        dp1: dh_dq1,
        dq1: -dh_dp1,
        dp2: dh_dq2,
        dq2: -dh_dp2,
        dlambda: -2.0 * c.rho * sp2 * cos_conv,
    })
}
