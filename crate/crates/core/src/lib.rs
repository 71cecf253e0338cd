//! Quantum phase transition of a three-level (Λ-type) atom-molecule bosonic
//! model: exact diagonalization on the conserved-`N` Fock space, mean-field
//! ground states, critical scaling, ground-state fidelity, and the adiabatic
//! geometric phase of the mean-field ground state.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod meanfield;
pub mod params;
pub mod quantum;

pub use error::{Error, Result};
pub use fock::{FockBasis, FockState};
pub use params::{Couplings, ModelParams};
