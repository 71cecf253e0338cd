//! Dense diagonalization and the common [`Spectrum`] container.

use faer::complex_native::c64;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lanczos::{self, LanczosOptions};
use super::sparse::{LinearOperator, SparseHermitian};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`eigensolve_dense`].
pub const DENSE_CEILING: usize = 5000;

/// Eigenvalues in ascending order with optional matching eigenvectors
/// (stored as columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub vectors: Option<DMatrix<Complex64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn vector(&self, k: usize) -> Option<DVector<Complex64>> {
        self.vectors.as_ref().map(|v| v.column(k).into_owned())
    }
}

/// Rotates `v` so that its largest-magnitude component is real and positive.
pub fn fix_phase(v: &mut DVector<Complex64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        // ties go to the lowest index; small slack keeps the choice stable
        // against round-off between numerically equal components
        if x.norm() > best_abs * (1.0 + 1e-9) {
            best_abs = x.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let rot = v[best].conj() / best_abs;
        for x in v.iter_mut() {
            *x *= rot;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

pub(crate) fn fix_phase_columns(m: &mut DMatrix<Complex64>) {
    for mut col in m.column_iter_mut() {
        let mut v = col.clone_owned();
        fix_phase(&mut v);
        col.copy_from(&v);
    }
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Eigen-decomposition of a real symmetric matrix, ascending.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = Mat::<f64>::from_fn(n, n, |r, c| m[(r, c)]).selfadjoint_eigendecomposition(Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let order = sorted_order(&(0..n).map(|i| s.read(i)).collect::<Vec<_>>());
    let vals = order.iter().map(|&i| s.read(i)).collect();
    (vals, DMatrix::from_fn(n, n, |r, c| u.read(r, order[c])))
}

/// Relative residual accepted from the dense solver.
const DENSE_RESIDUAL: f64 = 1e-10;

fn check_residuals(h: &SparseHermitian, values: &[f64], vectors: &DMatrix<Complex64>) -> Result<()> {
    let csr = h.to_csr();
    let scale = h.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut hv = vec![Complex64::new(0.0, 0.0); h.dim()];
    let mut worst: f64 = 0.0;
    for (k, &e) in values.iter().enumerate() {
        let v = vectors.column(k);
        csr.apply_into(v.as_slice(), &mut hv);
        let r: f64 = hv.iter().zip(v.iter()).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(r / scale);
    }
    if worst > DENSE_RESIDUAL {
        return Err(Error::Convergence { iterations: 1, best_residual: worst });
    }
    Ok(())
}

/// Full spectrum with orthonormal eigenvectors.
pub fn eigensolve_dense(h: &SparseHermitian) -> Result<Spectrum> {
    let dim = h.dim();
    if dim > DENSE_CEILING {
        return Err(Error::Capacity { dim, ceiling: DENSE_CEILING });
    }
    if dim == 0 {
        return Ok(Spectrum { energies: vec![], vectors: Some(DMatrix::zeros(0, 0)) });
    }
    let (values, mut vectors) = if h.is_real() {
        let (vals, vecs) = symmetric_eigen(&DMatrix::from_fn(dim, dim, |r, c| h.get(r, c).re));
        (vals, vecs.map(|x| Complex64::new(x, 0.0)))
    } else {
        let m = Mat::<c64>::from_fn(dim, dim, |r, c| {
            let x = if r >= c { h.get(r, c) } else { Complex64::new(0.0, 0.0) };
            c64 { re: x.re, im: x.im }
        });
        let eig = m.selfadjoint_eigendecomposition(Side::Lower);
        let (s, u) = (eig.s().column_vector(), eig.u());
        let order = sorted_order(&(0..dim).map(|i| s.read(i).re).collect::<Vec<_>>());
        let vals: Vec<f64> = order.iter().map(|&i| s.read(i).re).collect();
        let vecs = DMatrix::from_fn(dim, dim, |r, c| {
            let x = u.read(r, order[c]);
            Complex64::new(x.re, x.im)
        });
        (vals, vecs)
    };
    check_residuals(h, &values, &vectors)?;
    fix_phase_columns(&mut vectors);
    Ok(Spectrum { energies: values, vectors: Some(vectors) })
}

/// Lowest `k` eigenpairs by thick-restart Lanczos with full
/// reorthogonalization. Residuals satisfy `|Hv - Ev| <= tol * |H|` where
/// `|H|` is the Gershgorin bound.
pub fn eigensolve_lowest(h: &SparseHermitian, k: usize) -> Result<Spectrum> {
    eigensolve_lowest_with(h, k, &LanczosOptions::default(), None)
}

pub fn eigensolve_lowest_with(
    h: &SparseHermitian,
    k: usize,
    opts: &LanczosOptions,
    start: Option<&DVector<Complex64>>,
) -> Result<Spectrum> {
    if let Some(op) = h.to_csr_real() {
        let start = start.map(|s| s.map(|x| x.re));
        let (vals, vecs) = lanczos::lowest(&op, k, opts, start.as_ref())?;
        let mut vectors = vecs.map(|x| Complex64::new(x, 0.0));
        fix_phase_columns(&mut vectors);
        Ok(Spectrum { energies: vals, vectors: Some(vectors) })
    } else {
        let op = h.to_csr();
        let (vals, mut vectors) = lanczos::lowest(&op, k, opts, start)?;
        fix_phase_columns(&mut vectors);
        Ok(Spectrum { energies: vals, vectors: Some(vectors) })
    }
}
