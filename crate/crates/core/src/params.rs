//! Interaction-picture model parameters.
//!
//! Energies are measured in units of the atom-molecule coupling `rho`; the
//! molecular coupling `z` and detuning `delta` are usually quoted as ratios
//! `z / rho` and `delta / rho`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock;

/// Coupling constants shared by the quantum and mean-field descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    /// Detuning of the pump from the atom to excited-molecule transition.
    pub delta: f64,
    /// Coupling between the two molecular modes.
    pub z: f64,
    /// Atom-molecule conversion strength; sets the energy unit.
    pub rho: f64,
    /// Phase of the conversion coupling, reduced to `[0, 2pi)`.
    pub phi: f64,
}

impl Couplings {
    pub fn new(delta: f64, z: f64, rho: f64, phi: f64) -> Result<Self> {
        if !delta.is_finite() || !z.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "couplings must be finite (delta = {delta}, z = {z}, phi = {phi})"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive and finite, got {rho}"
            )));
        }
        Ok(Self { delta, z, rho, phi: phi.rem_euclid(TAU) })
    }

    /// `delta = 0`, `phi = 0`.
    pub fn resonant(z: f64, rho: f64) -> Result<Self> {
        Self::new(0.0, z, rho, 0.0)
    }

    pub fn with_z(self, z: f64) -> Result<Self> {
        Self::new(self.delta, z, self.rho, self.phi)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(delta, self.z, self.rho, self.phi)
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.delta, self.z, self.rho, phi)
    }
}

/// Full parameter set of the finite-`N` quantum model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Total atom number `n_a + 2 (n_g + n_e)`; even.
    pub n: u32,
    pub delta: f64,
    pub z: f64,
    pub rho: f64,
    pub phi: f64,
}

impl ModelParams {
    pub fn new(n: u32, delta: f64, z: f64, rho: f64, phi: f64) -> Result<Self> {
        fock::validate_atom_number(n)?;
        let c = Couplings::new(delta, z, rho, phi)?;
        Ok(Self::from_couplings(n, c))
    }

    pub(crate) fn from_couplings(n: u32, c: Couplings) -> Self {
        Self { n, delta: c.delta, z: c.z, rho: c.rho, phi: c.phi }
    }

    pub fn with_couplings(n: u32, c: Couplings) -> Result<Self> {
        fock::validate_atom_number(n)?;
        Ok(Self::from_couplings(n, c))
    }

    pub fn couplings(&self) -> Couplings {
        Couplings { delta: self.delta, z: self.z, rho: self.rho, phi: self.phi }
    }

    pub fn with_z(self, z: f64) -> Result<Self> {
        Self::new(self.n, self.delta, z, self.rho, self.phi)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.n, delta, self.z, self.rho, self.phi)
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        Self::new(self.n, self.delta, self.z, self.rho, phi)
    }

    pub fn with_n(self, n: u32) -> Result<Self> {
        Self::new(n, self.delta, self.z, self.rho, self.phi)
    }
}
