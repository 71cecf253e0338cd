//! Finite-`N` quantum model: Hamiltonian assembly on the Fock basis,
//! diagonalization, and ground-state observables.
//!
//! The interaction-picture Hamiltonian is
//!
//! ```text
//! H = delta (N_e + N_g) + z (b_e^+ b_g + h.c.) + rho / sqrt(N) (e^{-i phi} b_e^+ a a + h.c.)
//! ```

mod eigen;
mod lanczos;
mod sparse;

use nalgebra::DVector;
use num_complex::Complex64;

pub use eigen::{
    eigensolve_dense, eigensolve_lowest, eigensolve_lowest_with, fix_phase, Spectrum, DENSE_CEILING,
};
pub use lanczos::LanczosOptions;
pub use sparse::{CsrMatrix, LinearOperator, SparseHermitian};

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::params::ModelParams;

/// Dimensions up to this size are diagonalized densely by the convenience
/// routines; above it the Lanczos solver is used.
pub const DENSE_CUTOFF: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    Detuning,
    Molecular,
    /// Conversion `b_e^+ a a` stored at (source, target); the value carries
    /// `e^{+i phi}` in the upper triangle.
    Conversion,
}

/// Hamiltonian structure for a fixed basis; values are filled in for each
/// parameter set without re-enumerating the basis.
#[derive(Debug, Clone)]
pub struct HamiltonianTemplate {
    n: u32,
    dim: usize,
    /// Upper-triangle entries `(row, col, term, structural factor)`.
    upper: Vec<(usize, usize, Term, f64)>,
    n_a: Vec<f64>,
}

impl HamiltonianTemplate {
    pub fn new(basis: &FockBasis) -> Self {
        let n = basis.atom_number();
        let inv_sqrt_n = if n > 0 { 1.0 / (n as f64).sqrt() } else { 0.0 };
        let mut upper = Vec::with_capacity(3 * basis.len());
        for (i, s) in basis.iter() {
            upper.push((i, i, Term::Detuning, (s.n_g + s.n_e) as f64));
            if s.n_g > 0 {
                // b_e^+ b_g : (n_a, n_g, n_e) -> (n_a, n_g - 1, n_e + 1)
                let j = basis.index_unchecked(s.n_g - 1, s.n_e + 1);
                let f = ((s.n_g as f64) * (s.n_e as f64 + 1.0)).sqrt();
                upper.push((i.min(j), i.max(j), Term::Molecular, f));
            }
            if s.n_a >= 2 {
                // b_e^+ a a : (n_a, n_g, n_e) -> (n_a - 2, n_g, n_e + 1)
                let j = basis.index_unchecked(s.n_g, s.n_e + 1);
                debug_assert!(j > i);
                let na = s.n_a as f64;
                let f = inv_sqrt_n * (na * (na - 1.0) * (s.n_e as f64 + 1.0)).sqrt();
                upper.push((i, j, Term::Conversion, f));
            }
        }
        upper.sort_by_key(|&(r, c, _, _)| (r, c));
        let n_a = basis.states().iter().map(|s| s.n_a as f64).collect();
        Self { n, dim: basis.len(), upper, n_a }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom_number(&self) -> u32 {
        self.n
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if params.n != self.n {
            return Err(Error::InvalidParameter(format!(
                "parameters are for N = {} but the basis has N = {}",
                params.n, self.n
            )));
        }
        Ok(())
    }

    fn value(term: Term, f: f64, p: &ModelParams) -> Complex64 {
        match term {
            Term::Detuning => Complex64::new(p.delta * f, 0.0),
            Term::Molecular => Complex64::new(p.z * f, 0.0),
            Term::Conversion if p.phi == 0.0 => Complex64::new(p.rho * f, 0.0),
            Term::Conversion => Complex64::from_polar(p.rho * f, p.phi),
        }
    }

    pub fn assemble(&self, params: &ModelParams) -> Result<SparseHermitian> {
        self.check(params)?;
        let entries = self
            .upper
            .iter()
            .filter_map(|&(r, c, t, f)| {
                let v = Self::value(t, f, params);
                (r == c || v != Complex64::new(0.0, 0.0)).then_some((r, c, v))
            })
            .collect();
        SparseHermitian::new(self.dim, entries)
    }

    /// Expectation of `n_a / N` in a normalized state.
    pub fn atomic_fraction(&self, v: &DVector<Complex64>) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let s: f64 = v.iter().zip(&self.n_a).map(|(c, na)| c.norm_sqr() * na).sum();
        s / self.n as f64
    }
}

/// Assembles the Hamiltonian for `params` on `basis`.
pub fn build_hamiltonian(params: &ModelParams, basis: &FockBasis) -> Result<SparseHermitian> {
    HamiltonianTemplate::new(basis).assemble(params)
}

/// Lowest two levels and ground-state observables at one parameter point.
#[derive(Debug, Clone)]
pub struct GroundObservables {
    /// Ground energy, in units of `rho`.
    pub e0: f64,
    /// First excited energy, in units of `rho`.
    pub e1: f64,
    /// `(E1 - E0) / rho`.
    pub gap: f64,
    /// `<n_a> / N` in the ground state.
    pub atomic_fraction: f64,
    pub ground_vector: DVector<Complex64>,
}

/// Ground-state solver that reuses the assembled structure and warm-starts
/// the Lanczos iteration from the previous solution.
#[derive(Debug, Clone)]
pub struct GroundSolver {
    template: HamiltonianTemplate,
    options: LanczosOptions,
    warm_start: bool,
    previous: Option<DVector<Complex64>>,
}

impl GroundSolver {
    pub fn new(n: u32) -> Result<Self> {
        let basis = FockBasis::new(n)?;
        Ok(Self::from_basis(&basis))
    }

    pub fn from_basis(basis: &FockBasis) -> Self {
        Self {
            template: HamiltonianTemplate::new(basis),
            options: LanczosOptions::default(),
            warm_start: false,
            previous: None,
        }
    }

    /// Start each Lanczos run from the previous ground and first excited
    /// states. Results then depend on the order of calls, not only on the
    /// parameters.
    pub fn with_warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn with_options(mut self, options: LanczosOptions) -> Self {
        self.options = options;
        self
    }

    pub fn template(&self) -> &HamiltonianTemplate {
        &self.template
    }

    pub fn solve(&mut self, params: &ModelParams) -> Result<GroundObservables> {
        let h = self.template.assemble(params)?;
        let dim = h.dim();
        let want = dim.min(2);
        let spec = if dim <= DENSE_CUTOFF {
            eigensolve_dense(&h)?
        } else {
            let start = if self.warm_start { self.previous.as_ref() } else { None };
            let spec = eigensolve_lowest_with(&h, want, &self.options, start)?;
            if self.warm_start {
                let v = spec.vectors.as_ref().unwrap();
                let mix = v.column(0) + v.column(1) * Complex64::new(0.5, 0.0);
                self.previous = Some(mix);
            }
            spec
        };
        let ground_vector = spec.vector(0).expect("solver returns vectors");
        let e0 = spec.energies[0];
        let e1 = spec.energies.get(1).copied().unwrap_or(e0);
        Ok(GroundObservables {
            e0: e0 / params.rho,
            e1: e1 / params.rho,
            gap: (e1 - e0) / params.rho,
            atomic_fraction: self.template.atomic_fraction(&ground_vector),
            ground_vector,
        })
    }
}

/// Ground energy, first excited energy, gap and atomic fraction.
pub fn ground_observables(params: &ModelParams) -> Result<GroundObservables> {
    GroundSolver::new(params.n)?.solve(params)
}

/// Relative threshold (against [`SparseHermitian::norm_bound`]) below which
/// an eigenvalue counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Number of zero-energy levels at `delta = 0`, counted from the dense
/// spectrum.
pub fn zero_degeneracy(n: u32, z: f64, rho: f64) -> Result<usize> {
    let params = ModelParams::new(n, 0.0, z, rho, 0.0)?;
    let basis = FockBasis::new(n)?;
    let h = build_hamiltonian(&params, &basis)?;
    let threshold = ZERO_TOLERANCE * h.norm_bound();
    let spec = eigensolve_dense(&h)?;
    Ok(spec.energies.iter().filter(|e| e.abs() <= threshold).count())
}

/// Closed-form zero-level degeneracy `ceil((N/2 + 1) / 2)`.
pub fn zero_degeneracy_formula(n: u32) -> usize {
    ((n - n % 4) / 4 + 1) as usize
}

/// Modulus of the overlap of two normalized states.
pub fn fidelity(v1: &DVector<Complex64>, v2: &DVector<Complex64>) -> Result<f64> {
    if v1.len() != v2.len() {
        return Err(Error::InvalidParameter(format!(
            "state dimensions differ ({} vs {})",
            v1.len(),
            v2.len()
        )));
    }
    Ok(v1.dotc(v2).norm().min(1.0))
}
