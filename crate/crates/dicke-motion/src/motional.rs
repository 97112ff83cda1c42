//! Single-atom motional states along the interatomic axis and their
//! momentum-space overlap integrals
//!
//! ```text
//! I_ab(k) = int e^{ikz} phi_a(z) phi_b*(z) dz,
//! ```
//!
//! plus the N-atom ensemble description (separable mixtures and bosonic /
//! fermionic symmetrized products).
//!
//! Motion is quantized along the z' axis connecting the atoms only; the
//! transverse widths are taken to zero, so every center sits on that axis.
//! Lengths are in units of 1/k0, which makes a Gaussian width numerically
//! equal to the Lamb-Dicke parameter eta0 = k0 l0.

use crate::error::{Error, Result};
use crate::special::laguerre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Motional state of a single atom, quantized along z'.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MotionalState {
    /// Classical fixed position.
    PointLike { center: f64 },
    /// Harmonic ground state / minimal wave packet of rms width `width`.
    Gaussian { center: f64, width: f64 },
    /// Harmonic eigenstate with `n` vibrational quanta.
    Fock { n: u32, center: f64, width: f64 },
    /// Thermal mixture with mean phonon number `nbar`, trapped at the origin.
    Thermal { nbar: f64, width: f64 },
}

impl MotionalState {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MotionalState::PointLike { center } => center.is_finite(),
            MotionalState::Gaussian { center, width } => center.is_finite() && width > 0.0,
            MotionalState::Fock { center, width, .. } => center.is_finite() && width > 0.0,
            MotionalState::Thermal { nbar, width } => nbar >= 0.0 && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Ensemble(format!("invalid motional state {self:?}")))
        }
    }

    pub fn center(&self) -> f64 {
        match *self {
            MotionalState::PointLike { center }
            | MotionalState::Gaussian { center, .. }
            | MotionalState::Fock { center, .. } => center,
            MotionalState::Thermal { .. } => 0.0,
        }
    }

    /// Coarse variant family, used to gate symmetrization.
    pub fn family(&self) -> &'static str {
        match self {
            MotionalState::PointLike { .. } => "point-like",
            MotionalState::Gaussian { .. } => "gaussian",
            MotionalState::Fock { .. } => "fock",
            MotionalState::Thermal { .. } => "thermal",
        }
    }

    pub fn width(&self) -> Option<f64> {
        match *self {
            MotionalState::PointLike { .. } => None,
            MotionalState::Gaussian { width, .. }
            | MotionalState::Fock { width, .. }
            | MotionalState::Thermal { width, .. } => Some(width),
        }
    }

    /// Effective Gaussian width of the diagonal overlap: thermal states act
    /// as Gaussians of width l0 sqrt(2 nbar + 1).
    pub fn effective_width(&self) -> Option<f64> {
        match *self {
            MotionalState::Thermal { nbar, width } => Some(width * (2.0 * nbar + 1.0).sqrt()),
            _ => self.width(),
        }
    }
}

/// Momentum-space overlap I_ab(kz) between two motional states.
///
/// Supported pairs: any state with itself (diagonal), Gaussian-Gaussian at
/// arbitrary centers, and Fock-Fock at the same center and width. Everything
/// else has no closed form here and is rejected rather than approximated.
pub fn overlap(a: &MotionalState, b: &MotionalState, kz: f64) -> Result<Complex64> {
    use MotionalState::*;
    match (a, b) {
        (PointLike { center: za }, PointLike { center: zb }) => {
            if za == zb {
                Ok(Complex64::from_polar(1.0, kz * za))
            } else {
                Err(Error::UnsupportedOverlap(
                    "point-like states at distinct positions have no normalizable overlap".into(),
                ))
            }
        }
        (Gaussian { center: za, width: wa }, Gaussian { center: zb, width: wb }) => {
            if wa != wb {
                return Err(Error::UnsupportedOverlap(
                    "Gaussian overlap requires equal widths".into(),
                ));
            }
            let l2 = wa * wa;
            let phase = Complex64::from_polar(1.0, 0.5 * kz * (za + zb));
            let gauss = (-0.5 * kz * kz * l2).exp();
            let cross = (-(za - zb).powi(2) / (8.0 * l2)).exp();
            Ok(phase * gauss * cross)
        }
        (Fock { n: na, center: za, width: wa }, Fock { n: nb, center: zb, width: wb }) => {
            if wa != wb {
                return Err(Error::UnsupportedOverlap("Fock overlap requires equal widths".into()));
            }
            if za != zb {
                return Err(Error::UnsupportedOverlap(
                    "Fock overlap is only available for equal centers".into(),
                ));
            }
            Ok(fock_overlap(*na, *nb, *wa, *za, kz))
        }
        (Thermal { nbar: na, width: wa }, Thermal { nbar: nb, width: wb }) => {
            if na != nb || wa != wb {
                return Err(Error::UnsupportedOverlap(
                    "thermal overlap requires identical (nbar, width)".into(),
                ));
            }
            let lt2 = wa * wa * (2.0 * na + 1.0);
            Ok(Complex64::new((-0.5 * kz * kz * lt2).exp(), 0.0))
        }
        _ => Err(Error::UnsupportedOverlap(format!(
            "no closed-form overlap between {} and {} states",
            a.family(),
            b.family()
        ))),
    }
}

/// Overlap between Fock states n_a, n_b at a common center:
///
/// ```text
/// e^{ikz z} e^{-k^2 l^2/2} sqrt(n_<! / (n_< + dn)!) (i k l)^{dn} L^{dn}_{n_<}(k^2 l^2)
/// ```
fn fock_overlap(na: u32, nb: u32, width: f64, center: f64, kz: f64) -> Complex64 {
    let x = kz * kz * width * width;
    let n_lo = na.min(nb) as usize;
    let dn = na.abs_diff(nb) as usize;
    // sqrt(n_<!/(n_<+dn)!) without forming the factorials
    let mut ratio = 1.0;
    for m in 1..=dn {
        ratio /= (n_lo + m) as f64;
    }
    let mag = ratio.sqrt() * (kz * width).powi(dn as i32) * laguerre(n_lo, dn, x);
    let i_pow = Complex64::i().powu(dn as u32);
    Complex64::from_polar(1.0, kz * center) * (-0.5 * x).exp() * mag * i_pow
}

/// Real position-space overlap <phi_b | phi_a> entering the symmetrization
/// weights: Gaussians give e^{-(za-zb)^2 / 8 l^2}, Fock states at a common
/// center are orthonormal in n, point-like states are a Kronecker delta on
/// position.
pub fn position_overlap(a: &MotionalState, b: &MotionalState) -> Result<f64> {
    use MotionalState::*;
    match (a, b) {
        (PointLike { center: za }, PointLike { center: zb }) => {
            Ok(if za == zb { 1.0 } else { 0.0 })
        }
        (Gaussian { center: za, width: wa }, Gaussian { center: zb, width: wb }) => {
            if wa != wb {
                return Err(Error::UnsupportedOverlap(
                    "position overlap requires equal widths".into(),
                ));
            }
            Ok((-(za - zb).powi(2) / (8.0 * wa * wa)).exp())
        }
        (Fock { n: na, center: za, width: wa }, Fock { n: nb, center: zb, width: wb }) => {
            if wa != wb || za != zb {
                return Err(Error::UnsupportedOverlap(
                    "Fock position overlap requires a common center and width".into(),
                ));
            }
            Ok(if na == nb { 1.0 } else { 0.0 })
        }
        _ => Err(Error::UnsupportedOverlap(format!(
            "no position overlap between {} and {} states",
            a.family(),
            b.family()
        ))),
    }
}

/// Exchange statistics of the N-atom motional state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    /// Distinguishable atoms in a (possibly mixed) separable state.
    Separable,
    /// Bosonic symmetrized product.
    Symmetric,
    /// Fermionic antisymmetrized product.
    Antisymmetric,
}

/// One branch of a separable mixture: a product state with its weight.
#[derive(Debug, Clone)]
pub struct MixtureBranch {
    pub weight: f64,
    pub states: Vec<MotionalState>,
}

/// N-atom motional ensemble: one or more product configurations plus the
/// exchange statistics. Symmetrized ensembles are single pure products.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    branches: Vec<MixtureBranch>,
    statistics: Statistics,
}

impl EnsembleSpec {
    /// Single product configuration with the given statistics.
    pub fn pure(states: Vec<MotionalState>, statistics: Statistics) -> Result<Self> {
        Self::build(vec![MixtureBranch { weight: 1.0, states }], statistics)
    }

    /// Statistical mixture of product configurations (distinguishable atoms).
    pub fn mixture(branches: Vec<(f64, Vec<MotionalState>)>) -> Result<Self> {
        Self::build(
            branches
                .into_iter()
                .map(|(weight, states)| MixtureBranch { weight, states })
                .collect(),
            Statistics::Separable,
        )
    }

    fn build(branches: Vec<MixtureBranch>, statistics: Statistics) -> Result<Self> {
        if branches.is_empty() || branches[0].states.is_empty() {
            return Err(Error::Ensemble("ensemble needs at least one atom".into()));
        }
        let n = branches[0].states.len();
        let mut weight_sum = 0.0;
        for b in &branches {
            if b.states.len() != n {
                return Err(Error::Ensemble("all mixture branches must have the same N".into()));
            }
            if !(b.weight >= 0.0) {
                return Err(Error::Ensemble(format!("negative mixture weight {}", b.weight)));
            }
            weight_sum += b.weight;
            for s in &b.states {
                s.validate()?;
            }
        }
        if (weight_sum - 1.0).abs() > 1e-10 {
            return Err(Error::Ensemble(format!(
                "mixture weights must sum to 1 (got {weight_sum})"
            )));
        }
        if statistics != Statistics::Separable {
            if branches.len() != 1 {
                return Err(Error::Ensemble(
                    "symmetrized ensembles must be single pure products".into(),
                ));
            }
            let states = &branches[0].states;
            let family = states[0].family();
            if family == "thermal" {
                return Err(Error::Ensemble(
                    "thermal states are mixtures and only enter separable ensembles".into(),
                ));
            }
            for s in states {
                if s.family() != family {
                    return Err(Error::Ensemble(
                        "symmetrized ensembles require a single state family".into(),
                    ));
                }
                if s.width() != states[0].width() {
                    return Err(Error::Ensemble(
                        "symmetrized ensembles require equal widths".into(),
                    ));
                }
            }
            if family == "fock" && states.iter().any(|s| s.center() != states[0].center()) {
                return Err(Error::Ensemble(
                    "symmetrized Fock ensembles require a common center".into(),
                ));
            }
            if statistics == Statistics::Antisymmetric {
                for i in 0..states.len() {
                    for j in i + 1..states.len() {
                        if states[i] == states[j] {
                            return Err(Error::Pauli(format!(
                                "duplicate states at atoms {i} and {j} are annihilated by the antisymmetrizer"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { branches, statistics })
    }

    pub fn len(&self) -> usize {
        self.branches[0].states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn branches(&self) -> &[MixtureBranch] {
        &self.branches
    }

    /// The single product configuration of a pure ensemble.
    pub fn states(&self) -> &[MotionalState] {
        &self.branches[0].states
    }
}
