//! Motional correlation functions C_ij(k) = <e^{ik (z_i - z_j)}> for every
//! supported ensemble: separable mixtures of distinguishable atoms, bosonic /
//! fermionic symmetrized products (exact permutation sums), and the
//! Bose-Einstein-condensate special case.
//!
//! Every supported correlation decomposes exactly into a finite sum of
//! kernel terms
//!
//! ```text
//! C(k) = sum_t  w_t  e^{i k c_t}  e^{-k^2 s_t}  P_t(k^2),
//! ```
//!
//! which is what the coefficient layer consumes: the angular quadrature
//! evaluates the sum directly, while the convolution and shift integrals use
//! the exact inverse Fourier transform of each term (a Gaussian times a
//! Hermite-polynomial combination).

use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use crate::motional::{EnsembleSpec, MotionalState, Statistics};
use crate::special::{hermite, laguerre_poly_rational, poly_to_f64};
use itertools::Itertools;
use num_complex::Complex64;

/// Permutation-pair capacity: (N!)^2 terms are enumerated exactly.
pub const MAX_SYMMETRIZED_ATOMS: usize = 6;
/// Floor on the normalized permutation-weight denominator.
const DENOMINATOR_FLOOR: f64 = 1e-14;
/// Gram condition numbers above this are flagged in the metadata.
pub const GRAM_CONDITION_FLAG: f64 = 1e8;

/// One additive term of a correlation function.
#[derive(Debug, Clone)]
pub struct KernelTerm {
    pub weight: f64,
    /// Phase center: contributes e^{i k center}.
    pub center: f64,
    /// Gaussian decay e^{-k^2 sigma2}; zero for point-like atoms.
    pub sigma2: f64,
    /// Polynomial in k^2 (unit constant term for plain Gaussian kernels).
    pub poly: Vec<f64>,
}

impl KernelTerm {
    fn eval(&self, kz: f64) -> Complex64 {
        let k2 = kz * kz;
        let mut p = 0.0;
        for &c in self.poly.iter().rev() {
            p = p * k2 + c;
        }
        let damp = (-k2 * self.sigma2).exp();
        Complex64::from_polar(1.0, kz * self.center) * (self.weight * damp * p)
    }

    /// Position-space kernel f(u) with int f du = weight * P(0):
    /// the inverse transform of e^{ikc} e^{-k^2 s} P(k^2) is
    ///
    /// ```text
    /// e^{-x^2}/(2 sqrt(pi s)) * sum_m P_m (-1/(4s))^m H_2m(x),   x = (u+c)/(2 sqrt(s))
    /// ```
    ///
    /// Not defined for point-like terms (sigma2 = 0), which the consumers
    /// evaluate as Dirac masses at u = -center.
    pub fn position_kernel(&self, u: f64) -> f64 {
        debug_assert!(self.sigma2 > 0.0);
        let s = self.sigma2;
        let x = (u + self.center) / (2.0 * s.sqrt());
        let gauss = (-x * x).exp();
        if gauss == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut scale = 1.0;
        for (m, &c) in self.poly.iter().enumerate() {
            if c != 0.0 {
                sum += c * scale * hermite(2 * m, x);
            }
            scale *= -1.0 / (4.0 * s);
        }
        self.weight * gauss * sum / (2.0 * (std::f64::consts::PI * s).sqrt())
    }

    /// Half-width beyond which the position kernel is numerically dead.
    pub fn support_halfwidth(&self) -> f64 {
        2.0 * self.sigma2.sqrt() * (30.0 + 2.0 * (self.poly.len() as f64).sqrt())
    }

    pub fn is_point_like(&self) -> bool {
        self.sigma2 == 0.0
    }
}

/// Correlation function of one atom pair of an ensemble, reduced to kernel
/// terms at construction time.
#[derive(Debug, Clone)]
pub struct CorrelationEvaluator {
    terms: Vec<KernelTerm>,
    /// Condition number of the single-atom Gram matrix (symmetrized only).
    gram_condition: Option<f64>,
}

impl CorrelationEvaluator {
    /// Build the evaluator for atoms `i`, `j` of `ensemble`. For i == j the
    /// correlation is identically 1.
    pub fn new(ensemble: &EnsembleSpec, i: usize, j: usize) -> Result<Self> {
        let n = ensemble.len();
        if i >= n || j >= n {
            return Err(Error::Dimension(format!(
                "atom index out of range: ({i}, {j}) for N = {n}"
            )));
        }
        if i == j {
            return Ok(Self {
                terms: vec![KernelTerm { weight: 1.0, center: 0.0, sigma2: 0.0, poly: vec![1.0] }],
                gram_condition: None,
            });
        }
        match ensemble.statistics() {
            Statistics::Separable => Self::separable(ensemble, i, j),
            Statistics::Symmetric => Self::symmetrized(ensemble, i, j, 1),
            Statistics::Antisymmetric => Self::symmetrized(ensemble, i, j, -1),
        }
    }

    fn separable(ensemble: &EnsembleSpec, i: usize, j: usize) -> Result<Self> {
        let mut merger = TermMerger::new();
        for branch in ensemble.branches() {
            let fi = diagonal_factor(&branch.states[i]);
            let fj = diagonal_factor(&branch.states[j]);
            merger.add(
                branch.weight,
                fi.center - fj.center,
                fi.sigma2 + fj.sigma2,
                poly_mul(&fi.poly, &fj.poly),
            );
        }
        Ok(Self { terms: merger.into_terms(), gram_condition: None })
    }

    fn symmetrized(ensemble: &EnsembleSpec, i: usize, j: usize, sign: i32) -> Result<Self> {
        let states = ensemble.states();
        let n = states.len();
        if n > MAX_SYMMETRIZED_ATOMS {
            return Err(Error::Capacity(format!(
                "symmetrized ensembles support N <= {MAX_SYMMETRIZED_ATOMS} (got {n}); \
                 the permutation sum has (N!)^2 terms"
            )));
        }
        // Gram matrix of single-atom position overlaps
        let mut gram = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                gram[a][b] = crate::motional::position_overlap(&states[a], &states[b])?;
            }
        }
        let eigs = sym_eigenvalues(&gram);
        let gram_condition = {
            let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
            let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
            Some(if min > 0.0 { max / min } else { f64::INFINITY })
        };

        let perms: Vec<(Vec<usize>, f64)> = (0..n)
            .permutations(n)
            .map(|p| {
                let s = if sign < 0 { perm_sign(&p) } else { 1.0 };
                (p, s)
            })
            .collect();

        // denominator sum_{p,p'} s s' prod_n G[p(n)][p'(n)] = N! perm+-(G)
        let mut denom = 0.0;
        for (p, sp) in &perms {
            for (pp, spp) in &perms {
                let mut g = sp * spp;
                for a in 0..n {
                    g *= gram[p[a]][pp[a]];
                    if g == 0.0 {
                        break;
                    }
                }
                denom += g;
            }
        }
        let n_fact: f64 = (1..=n).map(|k| k as f64).product();
        if (denom / n_fact).abs() < DENOMINATOR_FLOOR {
            return Err(Error::Pauli(format!(
                "permutation-weight denominator vanished (perm = {:.3e}); \
                 the symmetrized state is degenerate",
                denom / n_fact
            )));
        }

        let mut merger = TermMerger::new();
        for (p, sp) in &perms {
            for (pp, spp) in &perms {
                // lambda numerator over spectator atoms, times the full-size
                // overlap factors folded into the I-product below
                let mut w = sp * spp / denom;
                for a in 0..n {
                    if a == i || a == j {
                        continue;
                    }
                    w *= gram[p[a]][pp[a]];
                    if w == 0.0 {
                        break;
                    }
                }
                if w == 0.0 {
                    continue;
                }
                let Some(fi) = cross_factor(&states[p[i]], &states[pp[i]]) else { continue };
                let Some(fj) = cross_factor(&states[p[j]], &states[pp[j]]) else { continue };
                // I_{p(i)p'(i)}(k) I_{p(j)p'(j)}(-k): centers subtract and the
                // (i k w)^dn prefactors combine to an even power of k with
                // sign i^{dn_i - dn_j}; the spectator filter guarantees
                // dn_i = dn_j, so the power is even and the sign real
                let total_dn = fi.dn + fj.dn;
                debug_assert_eq!(total_dn % 2, 0);
                let sign =
                    if (fi.dn as i64 - fj.dn as i64).rem_euclid(4) == 2 { -1.0 } else { 1.0 };
                let widths = fi.width.powi(fi.dn as i32) * fj.width.powi(fj.dn as i32);
                let mut poly = vec![0.0; total_dn / 2];
                poly.extend(poly_mul(&fi.lag, &fj.lag));
                merger.add(
                    w * fi.scale * fj.scale * sign * widths,
                    fi.center - fj.center,
                    fi.sigma2 + fj.sigma2,
                    poly,
                );
            }
        }
        Ok(Self { terms: merger.into_terms(), gram_condition })
    }

    /// C(kz) as a complex number; exactly 1 at kz = 0 up to rounding.
    pub fn eval(&self, kz: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(kz)).sum()
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn gram_condition(&self) -> Option<f64> {
        self.gram_condition
    }

    /// True when the Gram matrix is too ill-conditioned to trust the
    /// permutation weights blindly.
    pub fn gram_flagged(&self) -> bool {
        self.gram_condition.map(|c| c > GRAM_CONDITION_FLAG).unwrap_or(false)
    }
}

/// Diagonal overlap factor I_aa(k) = e^{ik c} e^{-k^2 s} P(k^2) of one atom.
struct DiagonalFactor {
    center: f64,
    sigma2: f64,
    poly: Vec<f64>,
}

fn diagonal_factor(state: &MotionalState) -> DiagonalFactor {
    match *state {
        MotionalState::PointLike { center } => {
            DiagonalFactor { center, sigma2: 0.0, poly: vec![1.0] }
        }
        MotionalState::Gaussian { center, width } => {
            DiagonalFactor { center, sigma2: 0.5 * width * width, poly: vec![1.0] }
        }
        MotionalState::Fock { n, center, width } => DiagonalFactor {
            center,
            sigma2: 0.5 * width * width,
            poly: laguerre_in_k2(n as usize, 0, width),
        },
        MotionalState::Thermal { nbar, width } => DiagonalFactor {
            center: 0.0,
            sigma2: 0.5 * width * width * (2.0 * nbar + 1.0),
            poly: vec![1.0],
        },
    }
}

/// Cross overlap factor I_ab(k) = scale (i k w)^dn e^{ik c} e^{-k^2 s} L(k^2),
/// or None when it vanishes identically (orthogonal states). The k^dn power
/// and the i^dn phase are resolved at the pair level.
struct CrossFactor {
    scale: f64,
    dn: usize,
    width: f64,
    center: f64,
    sigma2: f64,
    /// L^dn_{n<}(k^2 w^2) as monomial coefficients in k^2.
    lag: Vec<f64>,
}

fn cross_factor(a: &MotionalState, b: &MotionalState) -> Option<CrossFactor> {
    use MotionalState::*;
    match (a, b) {
        (PointLike { center: za }, PointLike { center: zb }) => (za == zb).then(|| CrossFactor {
            scale: 1.0,
            dn: 0,
            width: 0.0,
            center: *za,
            sigma2: 0.0,
            lag: vec![1.0],
        }),
        (Gaussian { center: za, width: w }, Gaussian { center: zb, .. }) => Some(CrossFactor {
            scale: (-(za - zb).powi(2) / (8.0 * w * w)).exp(),
            dn: 0,
            width: *w,
            center: 0.5 * (za + zb),
            sigma2: 0.5 * w * w,
            lag: vec![1.0],
        }),
        (Fock { n: na, center: z, width: w }, Fock { n: nb, .. }) => {
            let n_lo = (*na).min(*nb) as usize;
            let dn = na.abs_diff(*nb) as usize;
            let mut ratio = 1.0;
            for m in 1..=dn {
                ratio /= (n_lo + m) as f64;
            }
            Some(CrossFactor {
                scale: ratio.sqrt(),
                dn,
                width: *w,
                center: *z,
                sigma2: 0.5 * w * w,
                lag: laguerre_in_k2(n_lo, dn, *w),
            })
        }
        _ => None,
    }
}

/// Monomial coefficients of L_n^alpha(k^2 w^2) as a polynomial in k^2.
fn laguerre_in_k2(n: usize, alpha: usize, width: f64) -> Vec<f64> {
    let coeffs = poly_to_f64(&laguerre_poly_rational(n, alpha));
    coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| c * width.powi(2 * m as i32))
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn perm_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Accumulates kernel terms, merging identical (center, sigma2, poly) keys so
/// the (N!)^2 permutation sum collapses to a handful of distinct kernels.
struct TermMerger {
    terms: Vec<KernelTerm>,
    index: std::collections::HashMap<(u64, u64, Vec<u64>), usize>,
}

impl TermMerger {
    fn new() -> Self {
        Self { terms: Vec::new(), index: std::collections::HashMap::new() }
    }

    fn add(&mut self, weight: f64, center: f64, sigma2: f64, poly: Vec<f64>) {
        if weight == 0.0 {
            return;
        }
        let key = (
            center.to_bits(),
            sigma2.to_bits(),
            poly.iter().map(|c| c.to_bits()).collect::<Vec<_>>(),
        );
        match self.index.get(&key) {
            Some(&at) => self.terms[at].weight += weight,
            None => {
                self.index.insert(key, self.terms.len());
                self.terms.push(KernelTerm { weight, center, sigma2, poly });
            }
        }
    }

    fn into_terms(self) -> Vec<KernelTerm> {
        self.terms
    }
}

// ---- spec-level operations ----

/// Correlation function of a separable (distinguishable-atom) ensemble.
pub fn corr_separable(ensemble: &EnsembleSpec, i: usize, j: usize, kz: f64) -> Result<Complex64> {
    if ensemble.statistics() != Statistics::Separable {
        return Err(Error::Ensemble("corr_separable needs a separable ensemble".into()));
    }
    if i == j {
        return Err(Error::Dimension("corr_separable is defined for i != j".into()));
    }
    Ok(CorrelationEvaluator::new(ensemble, i, j)?.eval(kz))
}

/// Correlation function of a symmetrized ensemble; `statistics` must restate
/// the intended sign and match the ensemble.
pub fn corr_symmetrized(
    ensemble: &EnsembleSpec,
    i: usize,
    j: usize,
    kz: f64,
    statistics: Statistics,
) -> Result<Complex64> {
    if statistics == Statistics::Separable || ensemble.statistics() != statistics {
        return Err(Error::Ensemble(format!(
            "corr_symmetrized sign {:?} does not match ensemble statistics {:?}",
            statistics,
            ensemble.statistics()
        )));
    }
    Ok(CorrelationEvaluator::new(ensemble, i, j)?.eval(kz))
}

/// Bose-Einstein-condensate correlation |F_k[|phi_0|^2]|^2 for a single
/// occupied Gaussian or Fock state.
pub fn corr_bec(state: &MotionalState, kz: f64) -> Result<f64> {
    match state {
        MotionalState::Gaussian { .. } | MotionalState::Fock { .. } => {
            let f = diagonal_factor(state);
            let term =
                KernelTerm { weight: 1.0, center: 0.0, sigma2: 2.0 * f.sigma2, poly: poly_mul(&f.poly, &f.poly) };
            Ok(term.eval(kz).re)
        }
        _ => Err(Error::UnsupportedOverlap(
            "condensate correlation is defined for Gaussian or Fock states".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use crate::quad::integrate_gl;

    fn gauss(center: f64, width: f64) -> MotionalState {
        MotionalState::Gaussian { center, width }
    }

    fn fock(n: u32, center: f64, width: f64) -> MotionalState {
        MotionalState::Fock { n, center, width }
    }

    fn kz_grid() -> Vec<f64> {
        (0..40).map(|i| -2.0 + 0.1 * i as f64).collect()
    }

    #[test]
    fn point_like_pair_is_classical_plane_wave() {
        let e = EnsembleSpec::pure(
            vec![MotionalState::PointLike { center: 1.7 }, MotionalState::PointLike { center: 0.5 }],
            Statistics::Separable,
        )
        .unwrap();
        for &k in &kz_grid() {
            let c = corr_separable(&e, 0, 1, k).unwrap();
            let expect = Complex64::from_polar(1.0, k * 1.2);
            assert_abs_diff_eq!(c.re, expect.re, epsilon = 1e-14);
            assert_abs_diff_eq!(c.im, expect.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn gaussian_pair_formula() {
        let r = 3.0;
        let w = 0.8;
        let e = EnsembleSpec::pure(vec![gauss(r, w), gauss(0.0, w)], Statistics::Separable).unwrap();
        for &k in &kz_grid() {
            let c = corr_separable(&e, 0, 1, k).unwrap();
            let mag = (-k * k * w * w).exp();
            assert_relative_eq!(c.re, mag * (k * r).cos(), epsilon = 1e-13, max_relative = 1e-13);
            assert_relative_eq!(c.im, mag * (k * r).sin(), epsilon = 1e-13, max_relative = 1e-13);
        }
    }

    #[test]
    fn thermal_pair_has_effective_width() {
        let (nbar, w) = (2.0, 0.6);
        let t = MotionalState::Thermal { nbar, width: w };
        let e = EnsembleSpec::pure(vec![t, t], Statistics::Separable).unwrap();
        for &k in &kz_grid() {
            let c = corr_separable(&e, 0, 1, k).unwrap();
            assert_relative_eq!(
                c.re,
                (-k * k * w * w * (2.0 * nbar + 1.0)).exp(),
                epsilon = 1e-14,
                max_relative = 1e-13
            );
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn normalization_and_hermiticity_across_ensembles() {
        let ensembles = vec![
            EnsembleSpec::pure(vec![gauss(0.0, 1.0), gauss(2.5, 1.0)], Statistics::Symmetric)
                .unwrap(),
            EnsembleSpec::pure(vec![gauss(0.0, 1.0), gauss(2.5, 1.0)], Statistics::Antisymmetric)
                .unwrap(),
            EnsembleSpec::pure(
                vec![fock(0, 0.0, 0.9), fock(2, 0.0, 0.9), fock(5, 0.0, 0.9)],
                Statistics::Antisymmetric,
            )
            .unwrap(),
            EnsembleSpec::mixture(vec![
                (0.3, vec![gauss(0.0, 0.7), gauss(1.0, 1.1)]),
                (0.7, vec![gauss(0.5, 0.7), gauss(-1.0, 1.1)]),
            ])
            .unwrap(),
        ];
        for e in &ensembles {
            let c0 = CorrelationEvaluator::new(e, 0, 1).unwrap().eval(0.0);
            assert_abs_diff_eq!(c0.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c0.im, 0.0, epsilon = 1e-15);
            let ev = CorrelationEvaluator::new(e, 0, 1).unwrap();
            for &k in &[0.3, 1.1, 2.9] {
                let a = ev.eval(-k);
                let b = ev.eval(k).conj();
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn symmetrized_far_apart_reduces_to_separable() {
        // the permutation sum makes C exactly i <-> j symmetric, hence real:
        // what converges to the separable result (up to e^{-z^2/8l^2} cross
        // terms) is the even part of C, which is all the angular integral for
        // the rates ever sees
        let w = 1.0;
        let states = vec![gauss(0.0, w), gauss(12.0, w)];
        let sep = EnsembleSpec::pure(states.clone(), Statistics::Separable).unwrap();
        for stats in [Statistics::Symmetric, Statistics::Antisymmetric] {
            let sym = EnsembleSpec::pure(states.clone(), stats).unwrap();
            for &k in &[0.2, 0.9, 1.7] {
                let a = corr_symmetrized(&sym, 0, 1, k, stats).unwrap();
                let b = corr_separable(&sep, 0, 1, k).unwrap();
                assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-14);
                assert!((a.re - b.re).abs() < 1e-6, "far-apart mismatch at k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn symmetric_equals_separable_at_coincidence() {
        // identical states: the symmetrized product is the separable product
        let states = vec![gauss(0.4, 0.9), gauss(0.4, 0.9)];
        let sym = EnsembleSpec::pure(states.clone(), Statistics::Symmetric).unwrap();
        let sep = EnsembleSpec::pure(states, Statistics::Separable).unwrap();
        for &k in &kz_grid() {
            let a = corr_symmetrized(&sym, 0, 1, k, Statistics::Symmetric).unwrap();
            let b = corr_separable(&sep, 0, 1, k).unwrap();
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-13);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn pair_independence_for_three_symmetric_gaussians() {
        let states = vec![gauss(0.0, 1.0), gauss(1.3, 1.0), gauss(3.1, 1.0)];
        let e = EnsembleSpec::pure(states, Statistics::Symmetric).unwrap();
        let e01 = CorrelationEvaluator::new(&e, 0, 1).unwrap();
        let e02 = CorrelationEvaluator::new(&e, 0, 2).unwrap();
        let e12 = CorrelationEvaluator::new(&e, 1, 2).unwrap();
        for &k in &kz_grid() {
            let (a, b, c) = (e01.eval(k), e02.eval(k), e12.eval(k));
            assert!((a - b).norm() < 1e-12, "pair dependence at k={k}");
            assert!((a - c).norm() < 1e-12, "pair dependence at k={k}");
        }
    }

    #[test]
    fn antisymmetric_fock_pair_matches_grid_trace_oracle() {
        // psi^-(z1,z2) = (phi0 phi1 - phi1 phi0)/sqrt(2); trace e^{ik(z1-z2)}
        // against |psi|^2 on a quadrature grid
        let w = 1.0;
        let e = EnsembleSpec::pure(vec![fock(0, 0.0, w), fock(1, 0.0, w)], Statistics::Antisymmetric)
            .unwrap();
        let phi0 = |z: f64| {
            (2.0 * std::f64::consts::PI * w * w).powf(-0.25) * (-(z * z) / (4.0 * w * w)).exp()
        };
        let phi1 = |z: f64| phi0(z) * z / w;
        let psi2 = |z1: f64, z2: f64| {
            0.5 * (phi0(z1) * phi1(z2) - phi1(z1) * phi0(z2)).powi(2)
        };
        for &k in &[0.0, 0.4, 1.0, 1.8] {
            let direct = corr_symmetrized(&e, 0, 1, k, Statistics::Antisymmetric).unwrap();
            let oracle = integrate_gl(
                |z1| integrate_gl(|z2| (k * (z1 - z2)).cos() * psi2(z1, z2), -10.0, 10.0, 120),
                -10.0,
                10.0,
                120,
            );
            assert_abs_diff_eq!(direct.re, oracle, epsilon = 1e-9);
            assert_abs_diff_eq!(direct.im, 0.0, epsilon = 1e-14);
            // closed form e^{-x}(1 - 2x) with x = k^2 w^2
            let x = k * k * w * w;
            assert_relative_eq!(
                direct.re,
                (-x).exp() * (1.0 - 2.0 * x),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn bec_cases() {
        let g = gauss(0.0, 1.2);
        for &k in &kz_grid() {
            assert_relative_eq!(
                corr_bec(&g, k).unwrap(),
                (-k * k * 1.44).exp(),
                epsilon = 1e-14,
                max_relative = 1e-13
            );
        }
        assert_eq!(corr_bec(&g, 0.0).unwrap(), 1.0);
        // Fock n=1: |e^{-x/2} L_1(x)|^2, cross-checked by direct quadrature of
        // the Fourier transform of |phi_1|^2
        let w = 0.9;
        let f1 = fock(1, 0.0, w);
        let phi1sq = |z: f64| {
            let g2 = (2.0 * std::f64::consts::PI * w * w).powf(-0.5) * (-(z * z) / (2.0 * w * w)).exp();
            g2 * z * z / (w * w)
        };
        for &k in &[0.3, 1.0, 2.1] {
            let x = k * k * w * w;
            let expect = ((-0.5 * x).exp() * (1.0 - x)).powi(2);
            assert_relative_eq!(corr_bec(&f1, k).unwrap(), expect, epsilon = 1e-13, max_relative = 1e-12);
            let ft = integrate_gl(|z| (k * z).cos() * phi1sq(z), -12.0, 12.0, 200);
            assert_abs_diff_eq!(corr_bec(&f1, k).unwrap(), ft * ft, epsilon = 1e-10);
        }
        assert!(corr_bec(&MotionalState::Thermal { nbar: 1.0, width: 1.0 }, 0.5).is_err());
    }

    #[test]
    fn degenerate_antisymmetric_denominator_is_reported() {
        // nearly identical fermionic Gaussians: det(Gram) ~ 0
        let e = EnsembleSpec::pure(
            vec![gauss(0.0, 1.0), gauss(1e-9, 1.0)],
            Statistics::Antisymmetric,
        )
        .unwrap();
        match CorrelationEvaluator::new(&e, 0, 1) {
            Err(Error::Pauli(_)) => {}
            other => panic!("expected Pauli error, got {other:?}"),
        }
    }

    #[test]
    fn capacity_guard_on_atom_number() {
        let states: Vec<_> = (0..7).map(|i| gauss(i as f64 * 2.0, 1.0)).collect();
        let e = EnsembleSpec::pure(states, Statistics::Symmetric).unwrap();
        assert!(matches!(CorrelationEvaluator::new(&e, 0, 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn wrong_statistics_tag_is_rejected() {
        let e = EnsembleSpec::pure(vec![gauss(0.0, 1.0), gauss(2.0, 1.0)], Statistics::Symmetric)
            .unwrap();
        assert!(corr_separable(&e, 0, 1, 1.0).is_err());
        assert!(corr_symmetrized(&e, 0, 1, 1.0, Statistics::Antisymmetric).is_err());
        assert!(corr_symmetrized(&e, 0, 1, 1.0, Statistics::Separable).is_err());
    }

    #[test]
    fn gram_condition_reported_for_close_bosons() {
        let e = EnsembleSpec::pure(
            vec![gauss(0.0, 1.0), gauss(1e-5, 1.0)],
            Statistics::Symmetric,
        )
        .unwrap();
        let ev = CorrelationEvaluator::new(&e, 0, 1).unwrap();
        assert!(ev.gram_flagged(), "condition = {:?}", ev.gram_condition());
        let far = EnsembleSpec::pure(vec![gauss(0.0, 1.0), gauss(9.0, 1.0)], Statistics::Symmetric)
            .unwrap();
        assert!(!CorrelationEvaluator::new(&far, 0, 1).unwrap().gram_flagged());
    }
}
