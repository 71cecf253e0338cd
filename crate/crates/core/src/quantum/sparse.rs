//! Sparse Hermitian storage and compressed-row operators for matvec.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermitian matrix stored as its upper triangle (diagonal included) in
/// coordinate form, sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    /// Builds from upper-triangle entries. Entries are sorted; duplicates,
    /// lower-triangle positions, and complex diagonals are rejected.
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::InvalidData(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        for &(r, c, v) in &entries {
            if r > c || c >= dim {
                return Err(Error::InvalidData(format!(
                    "entry ({r}, {c}) is outside the upper triangle of a {dim}x{dim} matrix"
                )));
            }
            if r == c && v.im != 0.0 {
                return Err(Error::InvalidData(format!("diagonal entry ({r}, {r}) is not real")));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let entries = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, Complex64::new(d, 0.0)))
            .collect();
        Self { dim: diag.len(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    /// Value of `H[row, col]`, using Hermitian closure for the lower triangle.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let (r, c, conj) = if row <= col { (row, col, false) } else { (col, row, true) };
        match self.entries.binary_search_by_key(&(r, c), |&(a, b, _)| (a, b)) {
            Ok(k) => {
                let v = self.entries[k].2;
                if conj {
                    v.conj()
                } else {
                    v
                }
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|(_, _, v)| v.im == 0.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Cheap norm bound: largest entry magnitude times dimension.
    pub fn norm_bound(&self) -> f64 {
        self.max_abs_entry() * self.dim as f64
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        for &(r, c, v) in &self.entries {
            rows[r] += v.norm();
            if r != c {
                rows[c] += v.norm();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
        m
    }

    /// Dense real symmetric form, when every entry is real.
    pub fn to_dense_real(&self) -> Option<DMatrix<f64>> {
        if !self.is_real() {
            return None;
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v.re;
            m[(c, r)] = v.re;
        }
        Some(m)
    }

    pub fn to_csr_real(&self) -> Option<CsrMatrix<f64>> {
        if !self.is_real() {
            return None;
        }
        Some(CsrMatrix::from_upper(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v.re)), |x| x))
    }

    pub fn to_csr(&self) -> CsrMatrix<Complex64> {
        CsrMatrix::from_upper(self.dim, self.entries.iter().copied(), |x| x.conj())
    }

    /// `y = H x`.
    pub fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut y = DVector::zeros(self.dim);
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
            if r != c {
                y[c] += v.conj() * x[r];
            }
        }
        y
    }
}

/// Linear operator interface used by the iterative solver.
pub trait LinearOperator<T> {
    fn dim(&self) -> usize;
    /// `y = A x`; `y` is overwritten.
    fn apply_into(&self, x: &[T], y: &mut [T]);
    /// Upper bound on the spectral norm.
    fn norm_bound(&self) -> f64;
}

/// Full (both triangles) compressed-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy + Default> CsrMatrix<T> {
    fn from_upper<I, F>(dim: usize, upper: I, mirror: F) -> Self
    where
        I: Iterator<Item = (usize, usize, T)> + Clone,
        F: Fn(T) -> T,
    {
        let mut counts = vec![0usize; dim + 1];
        for (r, c, _) in upper.clone() {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[dim];
        let mut next = counts.clone();
        let mut cols = vec![0usize; nnz];
        let mut values = vec![T::default(); nnz];
        for (r, c, v) in upper {
            cols[next[r]] = c;
            values[next[r]] = v;
            next[r] += 1;
            if r != c {
                cols[next[c]] = r;
                values[next[c]] = mirror(v);
                next[c] += 1;
            }
        }
        let mut m = Self { dim, row_ptr: counts, cols, values };
        m.sort_rows();
        m
    }

    fn sort_rows(&mut self) {
        for i in 0..self.dim {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut row: Vec<(usize, T)> =
                self.cols[a..b].iter().copied().zip(self.values[a..b].iter().copied()).collect();
            row.sort_by_key(|&(c, _)| c);
            for (k, (c, v)) in row.into_iter().enumerate() {
                self.cols[a + k] = c;
                self.values[a + k] = v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

}

macro_rules! csr_operator {
    ($t:ty, $abs:expr) => {
        impl LinearOperator<$t> for CsrMatrix<$t> {
            fn dim(&self) -> usize {
                self.dim
            }

            fn apply_into(&self, x: &[$t], y: &mut [$t]) {
                for (i, yi) in y.iter_mut().enumerate() {
                    let mut acc = <$t>::default();
                    for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                        acc += self.values[k] * x[self.cols[k]];
                    }
                    *yi = acc;
                }
            }

            fn norm_bound(&self) -> f64 {
                let abs: fn(&$t) -> f64 = $abs;
                (0..self.dim)
                    .map(|i| self.values[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(abs).sum::<f64>())
                    .fold(0.0, f64::max)
            }
        }
    };
}

csr_operator!(f64, |v| v.abs());
csr_operator!(Complex64, |v| v.norm());
