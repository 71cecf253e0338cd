//! Fock basis of one atomic and two molecular modes at fixed total atom
//! number `N = n_a + 2 (n_g + n_e)`.
//!
//! States are ordered with `n_e` as the major key and `n_g` as the minor key,
//! both ascending; `n_a` is implied. For `N = 2` this gives
//! `[(2,0,0), (0,1,0), (0,0,1)]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total atom number accepted by [`FockBasis::new`].
///
/// At this size the basis holds about two million states; Hamiltonians are
/// still sparse enough to assemble, but only the iterative solver applies.
pub const MAX_N: u32 = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState {
    pub n_a: u32,
    pub n_g: u32,
    pub n_e: u32,
}

impl FockState {
    pub fn new(n_a: u32, n_g: u32, n_e: u32) -> Self {
        Self { n_a, n_g, n_e }
    }

    /// Total atom number carried by the state.
    pub fn atom_number(&self) -> u64 {
        self.n_a as u64 + 2 * (self.n_g as u64 + self.n_e as u64)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_a, self.n_g, self.n_e)
    }
}

/// Number of basis states for total atom number `n` (even).
pub fn dimension(n: u32) -> usize {
    let m = (n / 2) as usize;
    (m + 1) * (m + 2) / 2
}

/// Checks that `n` is an admissible total atom number.
pub fn validate_atom_number(n: u32) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "total atom number must be even, got {n}"
        )));
    }
    if n > MAX_N {
        return Err(Error::InvalidParameter(format!(
            "total atom number {n} exceeds the supported maximum {MAX_N}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n: u32,
    states: Vec<FockState>,
}

impl FockBasis {
    /// Enumerates the basis for total atom number `n`.
    pub fn new(n: u32) -> Result<Self> {
        validate_atom_number(n)?;
        let half = n / 2;
        let mut states = Vec::with_capacity(dimension(n));
        for n_e in 0..=half {
            for n_g in 0..=(half - n_e) {
                states.push(FockState::new(n - 2 * (n_g + n_e), n_g, n_e));
            }
        }
        debug_assert_eq!(states.len(), dimension(n));
        Ok(Self { n, states })
    }

    /// Same as [`FockBasis::new`] for callers holding a signed count.
    pub fn from_signed(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::InvalidParameter(format!(
                "total atom number must be non-negative, got {n}"
            )));
        }
        let n = u32::try_from(n)
            .map_err(|_| Error::InvalidParameter(format!("total atom number {n} is too large")))?;
        Self::new(n)
    }

    pub fn atom_number(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Option<FockState> {
        self.states.get(index).copied()
    }

    /// Position of `state` in the canonical ordering.
    pub fn index_of(&self, state: &FockState) -> Result<usize> {
        if state.atom_number() != self.n as u64 {
            return Err(Error::NotFound(format!(
                "{state} (atom number {} != {})",
                state.atom_number(),
                self.n
            )));
        }
        Ok(self.index_unchecked(state.n_g, state.n_e))
    }

    /// Closed-form position of `(n_g, n_e)`; the caller guarantees
    /// `n_g + n_e <= N/2`.
    #[inline]
    pub(crate) fn index_unchecked(&self, n_g: u32, n_e: u32) -> usize {
        let half = (self.n / 2) as usize;
        let (g, e) = (n_g as usize, n_e as usize);
        // blocks of constant n_e have length half - e + 1
        e * (half + 1) - e * e.saturating_sub(1) / 2 + g
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &FockState)> {
        self.states.iter().enumerate()
    }
}
