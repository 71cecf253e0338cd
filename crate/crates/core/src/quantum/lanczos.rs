//! Thick-restart Lanczos for the lowest eigenpairs of a Hermitian operator.
//!
//! Every new Krylov vector is orthogonalized twice (classical Gram-Schmidt)
//! against the whole active basis, and the projected matrix is accumulated
//! from those projection coefficients. This makes the restarted "arrow"
//! couplings appear automatically and keeps the Rayleigh quotient exact to
//! round-off. After each cycle the lowest Ritz vectors are kept and the
//! Krylov expansion continues from the last residual direction.

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::symmetric_eigen;
use super::sparse::LinearOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// Residual target relative to the operator norm bound.
    pub tol: f64,
    /// Maximum basis size per restart cycle.
    pub subspace: usize,
    pub max_restarts: usize,
    /// Seed for the random start vector and breakdown replacements.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, subspace: 24, max_restarts: 4000, seed: 0x1a2b_3c4d }
    }
}

fn random_vector<T: ComplexField<RealField = f64> + Copy>(n: usize, rng: &mut ChaCha8Rng) -> DVector<T> {
    DVector::from_fn(n, |_, _| T::from_real(rng.gen_range(-1.0..1.0)))
}

/// Orthogonalizes `w` against the first `cols` columns of `basis` (twice) and
/// returns the accumulated projection coefficients.
fn orthogonalize<T: ComplexField<RealField = f64> + Copy>(
    basis: &DMatrix<T>,
    cols: usize,
    w: &mut DVector<T>,
) -> DVector<T> {
    let active = basis.columns(0, cols);
    let mut h = active.ad_mul(w);
    w.gemv(T::from_real(-1.0), &active, &h, T::one());
    let h2 = active.ad_mul(w);
    w.gemv(T::from_real(-1.0), &active, &h2, T::one());
    h += h2;
    h
}

/// Lowest `k` eigenvalues (ascending) and eigenvectors (as columns).
pub fn lowest<T, Op>(
    op: &Op,
    k: usize,
    opts: &LanczosOptions,
    start: Option<&DVector<T>>,
) -> Result<(Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T>,
{
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs from an operator of dimension {n}"
        )));
    }
    let m = n.min(opts.subspace.max(2 * k + 8));
    let norm = op.norm_bound().max(f64::MIN_POSITIVE);
    let tol = opts.tol * norm;
    let breakdown = 1e-12 * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis = DMatrix::<T>::zeros(n, m + 1);
    let mut proj = DMatrix::<f64>::zeros(m, m);

    let mut v0 = match start {
        Some(s) if s.len() == n && s.norm() > 0.0 => s.clone(),
        Some(s) if s.len() != n => {
            return Err(Error::InvalidParameter(format!(
                "start vector has length {}, expected {n}",
                s.len()
            )))
        }
        _ => random_vector(n, &mut rng),
    };
    v0.unscale_mut(v0.norm());
    basis.set_column(0, &v0);

    let mut w = DVector::<T>::zeros(n);
    let mut first = 0;
    let mut best_residual = f64::INFINITY;

    for cycle in 0..opts.max_restarts {
        let mut beta_last = 0.0;
        for j in first..m {
            op.apply_into(basis.column(j).as_slice(), w.as_mut_slice());
            let h = orthogonalize(&basis, j + 1, &mut w);
            for i in 0..=j {
                proj[(i, j)] = h[i].real();
                proj[(j, i)] = h[i].real();
            }
            if j + 1 == n {
                // the basis spans the whole space
                beta_last = 0.0;
                break;
            }
            let mut beta = w.norm();
            if beta <= breakdown {
                // invariant subspace: continue with a fresh orthogonal direction
                w = random_vector(n, &mut rng);
                orthogonalize(&basis, j + 1, &mut w);
                let norm_w = w.norm();
                w.unscale_mut(norm_w);
                beta = 0.0;
            } else {
                w.unscale_mut(beta);
            }
            basis.set_column(j + 1, &w);
            if j + 1 < m {
                proj[(j + 1, j)] = beta;
                proj[(j, j + 1)] = beta;
            }
            beta_last = beta;
        }

        let size = m.min(n);
        let (theta, ritz) = symmetric_eigen(&proj.view((0, 0), (size, size)).into_owned());

        let residual = |i: usize| (beta_last * ritz[(size - 1, i)]).abs();
        let worst = (0..k).map(residual).fold(0.0, f64::max);
        best_residual = best_residual.min(worst);

        if worst <= tol || size == n {
            let coeffs = ritz.columns(0, k).map(T::from_real);
            let vectors = basis.columns(0, size) * coeffs;
            if size == n || true_residual_ok(op, &theta[..k], &vectors, tol) {
                return Ok((theta[..k].to_vec(), vectors));
            }
        }

        if cycle + 1 == opts.max_restarts {
            break;
        }

        let keep = (k + (size - k) / 2).min(size - 2).max(k);
        let coeffs = ritz.columns(0, keep).map(T::from_real);
        let kept = basis.columns(0, size) * coeffs;
        let residual_dir = basis.column(size).into_owned();
        basis.columns_mut(0, keep).copy_from(&kept);
        basis.set_column(keep, &residual_dir);
        proj.fill(0.0);
        for i in 0..keep {
            proj[(i, i)] = theta[i];
        }
        first = keep;
    }

    Err(Error::Convergence {
        iterations: opts.max_restarts,
        best_residual: best_residual / norm,
    })
}

fn true_residual_ok<T, Op>(op: &Op, theta: &[f64], vectors: &DMatrix<T>, tol: f64) -> bool
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T>,
{
    let n = op.dim();
    let mut y = DVector::<T>::zeros(n);
    theta.iter().enumerate().all(|(i, &t)| {
        let x = vectors.column(i);
        op.apply_into(x.as_slice(), y.as_mut_slice());
        y.axpy(T::from_real(-t), &x, T::one());
        y.norm() <= tol
    })
}
