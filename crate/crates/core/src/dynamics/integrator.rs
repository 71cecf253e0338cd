//! Adaptive Dormand-Prince 5(4) integrator with FSAL and optional stop
//! times that are hit exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// State types the integrator can advance.
pub trait OdeState: Copy {
    fn zero() -> Self;
    /// `self + sum_i c_i * k_i`.
    fn combine(&self, terms: &[(f64, &Self)]) -> Self;
    /// Largest scaled error component: `|err_i| / (atol + rtol * max(|y0_i|, |y1_i|))`.
    fn error_ratio(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64;
}

impl<const D: usize> OdeState for [f64; D] {
    fn zero() -> Self {
        [0.0; D]
    }

    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = *self;
        for (c, k) in terms {
            for i in 0..D {
                out[i] += c * k[i];
            }
        }
        out
    }

    fn error_ratio(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        (0..D)
            .map(|i| err[i].abs() / (atol + rtol * y0[i].abs().max(y1[i].abs())))
            .fold(0.0, f64::max)
    }
}

// Complex components are scaled by their modulus so that the step sequence
// does not depend on a global phase rotation of the state.
impl<const D: usize> OdeState for [Complex64; D] {
    fn zero() -> Self {
        [Complex64::new(0.0, 0.0); D]
    }

    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = *self;
        for (c, k) in terms {
            for i in 0..D {
                out[i] += k[i] * *c;
            }
        }
        out
    }

    fn error_ratio(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        (0..D)
            .map(|i| err[i].norm() / (atol + rtol * y0[i].norm().max(y1[i].norm())))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_step: 0.1, initial_step: 1e-3, max_steps: 50_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1`.
///
/// `on_step(t_old, y_old, t_new, y_new)` is called after every accepted
/// step and may abort the integration. Steps are shortened to land exactly
/// on each time in `stops` (ascending, inside `(t0, t1]`).
pub fn integrate<S, F, O>(
    f: F,
    t0: f64,
    y0: S,
    t1: f64,
    stops: &[f64],
    ctl: &StepControl,
    mut on_step: O,
) -> Result<S>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
    O: FnMut(f64, &S, f64, &S) -> Result<()>,
{
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!("end time {t1} precedes start time {t0}")));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = ctl.initial_step.min(ctl.max_step).max(f64::MIN_POSITIVE);
    let mut stop_iter = stops.iter().copied().filter(|&s| s > t0 && s <= t1).peekable();
    let mut steps = 0usize;

    while t < t1 {
        let target = stop_iter.peek().copied().unwrap_or(t1);
        let remaining = target - t;
        let landing = h >= remaining;
        let step = if landing { remaining } else { h };

        let y2 = y.combine(&[(step * A21, &k1)]);
        let k2 = f(t + C2 * step, &y2);
        let y3 = y.combine(&[(step * A31, &k1), (step * A32, &k2)]);
        let k3 = f(t + C3 * step, &y3);
        let y4 = y.combine(&[(step * A41, &k1), (step * A42, &k2), (step * A43, &k3)]);
        let k4 = f(t + C4 * step, &y4);
        let y5 = y.combine(&[(step * A51, &k1), (step * A52, &k2), (step * A53, &k3), (step * A54, &k4)]);
        let k5 = f(t + C5 * step, &y5);
        let y6 = y.combine(&[
            (step * A61, &k1),
            (step * A62, &k2),
            (step * A63, &k3),
            (step * A64, &k4),
            (step * A65, &k5),
        ]);
        let k6 = f(t + step, &y6);
        let y_new = y.combine(&[(step * B1, &k1), (step * B3, &k3), (step * B4, &k4), (step * B5, &k5), (step * B6, &k6)]);
        let t_new = if landing { target } else { t + step };
        let k7 = f(t_new, &y_new);
        let err = S::zero().combine(&[
            (step * E1, &k1),
            (step * E3, &k3),
            (step * E4, &k4),
            (step * E5, &k5),
            (step * E6, &k6),
            (step * E7, &k7),
        ]);
        let ratio = S::error_ratio(&err, &y, &y_new, ctl.rtol, ctl.atol);
        if !ratio.is_finite() {
            return Err(Error::IntegrationFailure { t, reason: "non-finite error estimate".into() });
        }

        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::IntegrationFailure { t, reason: format!("exceeded {} steps", ctl.max_steps) });
        }

        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        if ratio <= 1.0 {
            on_step(t, &y, t_new, &y_new)?;
            t = t_new;
            y = y_new;
            k1 = k7;
            if landing && stop_iter.peek().is_some() {
                stop_iter.next();
            }
            // a step shortened to land on a stop says nothing about the
            // admissible size; keep the previous proposal in that case
            if !landing || step >= h {
                h = (step * factor).min(ctl.max_step);
            }
        } else {
            h = (step * factor.min(1.0)).min(ctl.max_step);
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure { t, reason: "step size underflow".into() });
            }
        }
    }
    Ok(y)
}
