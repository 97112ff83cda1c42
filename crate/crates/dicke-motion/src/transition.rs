//! Atomic transition parameters, pair geometry and the classical
//! (fixed-position) decay rate and dipole-dipole shift.
//!
//! Everything internal works in dimensionless units gamma0 = 1, k0 = 1, so a
//! separation enters as xi = k0 r and a wave-packet width as eta0 = k0 l0.
//! Conversion to physical units happens only at the CLI boundary.

use crate::error::{Error, Result};

/// Dipole transition type of the (polarized) atomic sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Pi,
    SigmaPlus,
    SigmaMinus,
}

/// Transition scales: `gamma0` is the single-atom spontaneous emission rate
/// (the unit of all rates and shifts), `k0` the transition wave number (the
/// unit of all inverse lengths).
#[derive(Debug, Clone, Copy)]
pub struct TransitionSpec {
    pub kind: TransitionKind,
    pub gamma0: f64,
    pub k0: f64,
}

impl TransitionSpec {
    pub fn new(kind: TransitionKind, gamma0: f64, k0: f64) -> Result<Self> {
        if !(gamma0 > 0.0) || !(k0 > 0.0) {
            return Err(Error::Domain(format!(
                "gamma0 and k0 must be positive (got {gamma0}, {k0})"
            )));
        }
        Ok(Self { kind, gamma0, k0 })
    }

    /// Dimensionless transition with unit scales.
    pub fn dimensionless(kind: TransitionKind) -> Self {
        Self { kind, gamma0: 1.0, k0: 1.0 }
    }

    /// Transition wavelength 2 pi / k0.
    pub fn lambda0(&self) -> f64 {
        std::f64::consts::TAU / self.k0
    }
}

/// Relative geometry of an atom pair: separation `r`, the angle `alpha`
/// between the quantization axis and the connecting vector, and the
/// dimensionless separation `xi = k0 r`.
#[derive(Debug, Clone, Copy)]
pub struct PairGeometry {
    pub r: f64,
    pub alpha: f64,
    pub xi: f64,
}

impl PairGeometry {
    pub fn new(r: f64, alpha: f64, k0: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("separation must be >= 0 (got {r})")));
        }
        check_alpha(alpha)?;
        Ok(Self { r, alpha, xi: k0 * r })
    }

    /// Dimensionless geometry (k0 = 1): `xi` doubles as the separation.
    pub fn dimensionless(xi: f64, alpha: f64) -> Result<Self> {
        Self::new(xi, alpha, 1.0)
    }
}

/// Angular factors (p, q) entering the classical decay rate and shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularFactors {
    pub p: f64,
    pub q: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, pi] (got {alpha})"
        )));
    }
    Ok(())
}

/// Angular factors for a transition of kind `kind` and a connecting vector at
/// angle `alpha` to the quantization axis:
///
/// ```text
/// pi:      p = sin^2 a,        q = 1 - 3 cos^2 a
/// sigma+-: p = (1+cos^2 a)/2,  q = (3 cos^2 a - 1)/2
/// ```
pub fn angular_factors(kind: TransitionKind, alpha: f64) -> Result<AngularFactors> {
    check_alpha(alpha)?;
    let c2 = alpha.cos().powi(2);
    let f = match kind {
        TransitionKind::Pi => AngularFactors { p: 1.0 - c2, q: 1.0 - 3.0 * c2 },
        TransitionKind::SigmaPlus | TransitionKind::SigmaMinus => {
            AngularFactors { p: 0.5 * (1.0 + c2), q: 0.5 * (3.0 * c2 - 1.0) }
        }
    };
    Ok(f)
}

/// Below this separation the classical rate switches to its Taylor expansion
/// to avoid cancellation between cos(xi)/xi^2 and sin(xi)/xi^3.
const GAMMA_CL_TAYLOR_CUT: f64 = 1e-3;

/// Classical decay rate between two fixed atoms, in units of gamma0:
///
/// ```text
/// (3/2) [ p sin(xi)/xi + q (cos(xi)/xi^2 - sin(xi)/xi^3) ]
/// ```
///
/// continuously extended through xi = 0 where it equals 1 for physical (p, q).
pub fn classical_gamma(xi: f64, f: AngularFactors) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::Domain(format!("xi must be >= 0 (got {xi})")));
    }
    if xi < GAMMA_CL_TAYLOR_CUT {
        // sin(x)/x       = 1 - x^2/6 + x^4/120 - x^6/5040
        // cos/x^2-sin/x^3 = -1/3 + x^2/30 - x^4/840 + x^6/45360
        let x2 = xi * xi;
        let sp = 1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 - x2 / 5040.0));
        let sq = -1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0));
        return Ok(1.5 * (f.p * sp + f.q * sq));
    }
    let (s, c) = xi.sin_cos();
    Ok(1.5 * (f.p * s / xi + f.q * (c / (xi * xi) - s / (xi * xi * xi))))
}

/// Classical dipole-dipole shift between two fixed atoms, in units of gamma0:
///
/// ```text
/// (3/4) [ -p cos(xi)/xi + q (sin(xi)/xi^2 + cos(xi)/xi^3) ]
/// ```
///
/// Genuinely divergent as xi -> 0 (q/xi^3 pole); callers must keep xi above
/// their regularization cutoff.
pub fn classical_delta(xi: f64, f: AngularFactors) -> Result<f64> {
    if !(xi > 0.0) {
        if xi == 0.0 {
            return Err(Error::Divergence(
                "classical shift has a 1/xi^3 pole at xi = 0".into(),
            ));
        }
        return Err(Error::Domain(format!("xi must be > 0 (got {xi})")));
    }
    let (s, c) = xi.sin_cos();
    Ok(0.75 * (-f.p * c / xi + f.q * (s / (xi * xi) + c / (xi * xi * xi))))
}
