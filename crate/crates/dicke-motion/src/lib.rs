//! Collective spontaneous emission with quantized atomic motion.
//!
//! Computes the pairwise decay rates and regularized dipole-dipole shifts of
//! N two-level atoms whose center-of-mass states are quantized along the
//! interatomic axis (point-like, Gaussian, Fock and thermal states, for
//! distinguishable atoms as well as bosonic/fermionic symmetrized states),
//! and integrates the resulting Lindblad master equation for the internal
//! dynamics.
//!
//! All rates are in units of the single-atom emission rate gamma0 and all
//! lengths in units of 1/k0.

pub mod coefficients;
pub mod correlation;
pub mod error;
pub mod linalg;
pub mod motional;
pub mod quad;
pub mod special;
pub mod transition;

pub use error::{Error, Result};
