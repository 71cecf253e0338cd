//! Nonlinear mean-field dynamics and the adiabatic geometric phase.
//!
//! The amplitudes evolve as
//!
//! ```text
//! i da/dt   = 2 rho e^{i phi} a^* b_e
//! i db_g/dt = delta b_g + z b_e
//! i db_e/dt = rho e^{-i phi} a^2 + z b_g + delta b_e
//! ```
//!
//! and equivalently in the canonical variables `p_1 = |b_g|^2`,
//! `p_2 = |b_e|^2`, `q_i = arg(b_i) - 2 arg(a)` and the total phase
//! `lambda = arg(a)`.

mod canonical;
mod integrator;
mod geophase;

use num_complex::Complex64;

use crate::meanfield::MeanFieldState;
use crate::params::Couplings;

pub use canonical::{
    canonical_from_amplitudes, amplitudes_from_canonical, hamilton_rhs, canonical_energy, CanonicalRates,
    CanonicalState, COORDINATE_FLOOR,
};
pub use geophase::{
    berry_phase_linearized, delta_p2_reference, evolve, evolve_canonical, fixed_point_chemical_potential,
    integrate_loop, lambda1_reference, wrap_phase, LoopOptions, LOOP_ATOL, LOOP_RTOL, NORM_DRIFT_LIMIT, LoopResult, PhaseRamp, TrajectorySample,
};
pub use integrator::{integrate, OdeState, StepControl};

/// Time derivative of the amplitudes.
pub fn eom_cartesian(state: &MeanFieldState, c: &Couplings) -> MeanFieldState {
    let minus_i = Complex64::new(0.0, -1.0);
    let up = Complex64::from_polar(c.rho, c.phi);
    let down = Complex64::from_polar(c.rho, -c.phi);
    let (a, g, e) = (state.a, state.b_g, state.b_e);
    MeanFieldState::new(
        minus_i * (up * 2.0 * a.conj() * e),
        minus_i * (g * c.delta + e * c.z),
        minus_i * (down * a * a + g * c.z + e * c.delta),
    )
}

pub(crate) fn to_array(s: &MeanFieldState) -> [Complex64; 3] {
    [s.a, s.b_g, s.b_e]
}

pub(crate) fn from_array(y: &[Complex64; 3]) -> MeanFieldState {
    MeanFieldState::new(y[0], y[1], y[2])
}
