//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dipole-dipole kernel diverges at zero separation; the caller must
    /// regularize with a cutoff.
    #[error("divergent dipole-dipole shift: {0}")]
    Divergence(String),

    /// Overlap requested between motional states for which no closed form is
    /// available.
    #[error("unsupported overlap: {0}")]
    UnsupportedOverlap(String),

    /// A size guard was exceeded (atom number, polynomial degree, ...).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A series or quadrature failed to reach its accuracy target. Carries the
    /// best available partial result.
    #[error("precision failure: {msg} (partial result {partial:.6e})")]
    Precision { msg: String, partial: f64 },

    /// The antisymmetrizer annihilated the state (duplicate fermionic states)
    /// or the permutation-weight denominator vanished.
    #[error("Pauli violation / degenerate symmetrization: {0}")]
    Pauli(String),

    /// A cross-check that must hold by construction failed (e.g. residual
    /// imaginary part of a manifestly real integral).
    #[error("numerical consistency failure: {0}")]
    Consistency(String),

    /// Ensemble description violates an invariant.
    #[error("invalid ensemble: {0}")]
    Ensemble(String),

    /// Operator/state dimensions do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The adaptive integrator could not reduce the step below the stiffness
    /// floor.
    #[error("stiffness: step size underflow at t = {0}")]
    Stiffness(f64),

    /// Run configuration is malformed.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
