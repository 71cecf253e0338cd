//! Numerical mean-field ground state for arbitrary detuning.
//!
//! The phase `phi` is removed by the gauge `b -> e^{-i phi} b`, after which
//! the ground state can be taken real with `a >= 0`. What remains is the
//! minimization of
//!
//! ```text
//! E(g, e) = delta (g^2 + e^2) + 2 z g e + 2 rho e (1 - 2 g^2 - 2 e^2)
//! ```
//!
//! over the disk `g^2 + e^2 <= 1/2`. Projected damped-Newton descents are
//! started from every sign pattern at several radii, the analytic optimum on
//! the boundary (`a = 0`) is added as a candidate, and the lowest candidate
//! is polished with undamped Newton steps.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::{eigen_residual, GroundSolution, MeanFieldState};
use crate::error::{Error, Result};
use crate::params::Couplings;

const BOUNDARY_R2: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericOptions {
    /// Start radii (in `sqrt(g^2 + e^2)`), each used with all four sign patterns.
    pub start_radii: Vec<f64>,
    pub max_iterations: usize,
    /// Residual of the nonlinear eigen-equation accepted for the result.
    pub residual_tol: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { start_radii: vec![0.15, 0.35, 0.6], max_iterations: 500, residual_tol: 1e-10 }
    }
}

struct Reduced {
    delta: f64,
    z: f64,
    rho: f64,
}

impl Reduced {
    fn energy(&self, x: &Vector2<f64>) -> f64 {
        let (g, e) = (x[0], x[1]);
        self.delta * (g * g + e * e) + 2.0 * self.z * g * e + 2.0 * self.rho * e * (1.0 - 2.0 * g * g - 2.0 * e * e)
    }

    fn gradient(&self, x: &Vector2<f64>) -> Vector2<f64> {
        let (g, e) = (x[0], x[1]);
        let (d, z, r) = (self.delta, self.z, self.rho);
        Vector2::new(
            2.0 * d * g + 2.0 * z * e - 8.0 * r * e * g,
            2.0 * d * e + 2.0 * z * g + 2.0 * r * (1.0 - 2.0 * g * g - 2.0 * e * e) - 8.0 * r * e * e,
        )
    }

    fn hessian(&self, x: &Vector2<f64>) -> Matrix2<f64> {
        let (g, e) = (x[0], x[1]);
        let (d, z, r) = (self.delta, self.z, self.rho);
        let off = 2.0 * z - 8.0 * r * g;
        Matrix2::new(2.0 * d - 8.0 * r * e, off, off, 2.0 * d - 24.0 * r * e)
    }

    /// Lowest energy on the circle `g^2 + e^2 = 1/2`: `delta/2 - |z|/2`.
    fn boundary_optimum(&self) -> Vector2<f64> {
        if self.z >= 0.0 {
            Vector2::new(0.5, -0.5)
        } else {
            Vector2::new(0.5, 0.5)
        }
    }
}

fn project(x: Vector2<f64>) -> Vector2<f64> {
    let r2 = x.norm_squared();
    if r2 > BOUNDARY_R2 {
        x * (BOUNDARY_R2 / r2).sqrt()
    } else {
        x
    }
}

/// Projected damped Newton descent; falls back to steepest descent where
/// the Hessian is not positive definite.
fn descend(model: &Reduced, start: Vector2<f64>, max_iterations: usize) -> Vector2<f64> {
    let mut x = project(start);
    let mut fx = model.energy(&x);
    for _ in 0..max_iterations {
        let grad = model.gradient(&x);
        if grad.norm() < 1e-15 {
            break;
        }
        let hess = model.hessian(&x);
        let newton = (hess[(0, 0)] > 0.0 && hess.determinant() > 0.0)
            .then(|| hess.try_inverse().map(|inv| -(inv * grad)))
            .flatten();
        let dir = newton.unwrap_or(-grad);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-20 {
            let trial = project(x + dir * t);
            let ft = model.energy(&trial);
            if ft < fx {
                moved = (trial - x).norm() > 0.0;
                x = trial;
                fx = ft;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

/// Undamped Newton on the gradient, kept only while it lowers the gradient.
fn polish(model: &Reduced, mut x: Vector2<f64>) -> Vector2<f64> {
    for _ in 0..20 {
        let grad = model.gradient(&x);
        let Some(inv) = model.hessian(&x).try_inverse() else { break };
        let next = x - inv * grad;
        if next.norm_squared() > BOUNDARY_R2 || model.gradient(&next).norm() >= grad.norm() {
            break;
        }
        x = next;
    }
    x
}

/// Mean-field ground state for any `delta`, `z`, `rho`, `phi`.
pub fn ground_state_numeric(c: &Couplings, opts: &NumericOptions) -> Result<GroundSolution> {
    let model = Reduced { delta: c.delta, z: c.z, rho: c.rho };

    let boundary = model.boundary_optimum();
    let mut best = (boundary, model.energy(&boundary), true);
    for &r in &opts.start_radii {
        let s = r * std::f64::consts::FRAC_1_SQRT_2;
        for (sg, se) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let x = descend(&model, Vector2::new(sg * s, se * s), opts.max_iterations);
            let fx = model.energy(&x);
            if fx < best.1 {
                best = (x, fx, x.norm_squared() >= BOUNDARY_R2 * (1.0 - 1e-15));
            }
        }
    }

    let (x, on_boundary) = if best.2 {
        (boundary, true)
    } else {
        let x = polish(&model, best.0);
        // an interior point collapsing onto a = 0 is the boundary solution
        if 1.0 - 2.0 * x.norm_squared() <= 0.0 {
            (boundary, true)
        } else {
            (x, false)
        }
    };

    // with a = 0 the phase drops out; keep the phi-free representative
    let (a, rot) = if on_boundary {
        (0.0, Complex64::new(1.0, 0.0))
    } else {
        ((1.0 - 2.0 * x.norm_squared()).sqrt(), Complex64::from_polar(1.0, -c.phi))
    };
    let state = MeanFieldState::new(a.into(), rot * x[0], rot * x[1]);
    let solution = GroundSolution::from_state(state, c)?;
    let residual = eigen_residual(&state, solution.mu, c);
    if !(residual <= opts.residual_tol) {
        return Err(Error::Convergence { iterations: opts.max_iterations, best_residual: residual });
    }
    Ok(solution)
}
