//! Hermite and generalized Laguerre polynomials, and the linearization of a
//! Laguerre product into the Laguerre basis,
//!
//! ```text
//! L_ni(x) L_nj(x) = sum_{l=|ni-nj|}^{ni+nj} c_{ni,nj,l} L_l(x),
//! ```
//!
//! with the coefficients computed in exact rational arithmetic — the
//! alternating factorial sum defining them is hopelessly ill-conditioned in
//! floating point.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Largest supported ni + nj for the linearization.
pub const MAX_LINEARIZATION_DEGREE: usize = 60;

/// Generalized Laguerre polynomial L_n^alpha(x) by the stable three-term
/// recurrence (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}.
pub fn laguerre(n: usize, alpha: usize, x: f64) -> f64 {
    let a = alpha as f64;
    if n == 0 {
        return 1.0;
    }
    let mut lm = 1.0;
    let mut l = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * l - (kf + a) * lm) / (kf + 1.0);
        lm = l;
        l = next;
    }
    l
}

/// Physicists' Hermite polynomial H_n(x): H_{n+1} = 2x H_n - 2n H_{n-1}.
pub fn hermite(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut hm = 1.0;
    let mut h = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * h - 2.0 * k as f64 * hm;
        hm = h;
        h = next;
    }
    h
}

/// Coefficients c_{ni,nj,l} of the Laguerre product linearization, for
/// l in [|ni-nj|, ni+nj], kept as exact rationals.
#[derive(Debug, Clone)]
pub struct LaguerreLinearization {
    pub n_i: usize,
    pub n_j: usize,
    /// coeffs[k] is c for l = |ni-nj| + k
    pub coeffs: Vec<BigRational>,
}

impl LaguerreLinearization {
    pub fn l_min(&self) -> usize {
        self.n_i.abs_diff(self.n_j)
    }

    /// (l, c_l) pairs in f64.
    pub fn iter_f64(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let l0 = self.l_min();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (l0 + k, c.to_f64().expect("coefficient fits f64")))
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact linearization coefficients
///
/// ```text
/// c_{ni,nj,l} = (-1/2)^p sum_n 2^{2n} (ni+nj-n)! / [(ni-n)! (nj-n)! (2n-p)! (p-n)!]
/// ```
///
/// with p = ni + nj - l, the sum running over all n with nonnegative
/// factorial arguments.
pub fn laguerre_product_coeffs(n_i: usize, n_j: usize) -> Result<LaguerreLinearization> {
    if n_i + n_j > MAX_LINEARIZATION_DEGREE {
        return Err(Error::Capacity(format!(
            "laguerre_product_coeffs supports ni + nj <= {MAX_LINEARIZATION_DEGREE} (got {})",
            n_i + n_j
        )));
    }
    let l_min = n_i.abs_diff(n_j);
    let l_max = n_i + n_j;
    let mut coeffs = Vec::with_capacity(l_max - l_min + 1);
    for l in l_min..=l_max {
        let p = n_i + n_j - l;
        let n_lo = p.div_ceil(2);
        let n_hi = p.min(n_i).min(n_j);
        let mut acc = BigRational::zero();
        for n in n_lo..=n_hi {
            let num = BigInt::from(1u8) << (2 * n);
            let num = num * factorial(n_i + n_j - n);
            let den = factorial(n_i - n) * factorial(n_j - n) * factorial(2 * n - p)
                * factorial(p - n);
            acc += BigRational::new(num, den);
        }
        // (-1/2)^p
        let sign_half = BigRational::new(
            if p % 2 == 0 { BigInt::one() } else { -BigInt::one() },
            BigInt::one() << p,
        );
        coeffs.push(sign_half * acc);
    }
    Ok(LaguerreLinearization { n_i, n_j, coeffs })
}

// ---- exact polynomial helpers (rational monomial coefficients) ----

/// Monomial coefficients of L_n^alpha: sum_m (-1)^m binom(n+alpha, n-m)/m! x^m.
pub fn laguerre_poly_rational(n: usize, alpha: usize) -> Vec<BigRational> {
    (0..=n)
        .map(|m| {
            let b = binomial(n + alpha, n - m);
            let c = BigRational::new(b, factorial(m));
            if m % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn poly_mul_rational(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact f64 view of rational monomial coefficients.
pub fn poly_to_f64(p: &[BigRational]) -> Vec<f64> {
    p.iter().map(|c| c.to_f64().expect("coefficient fits f64")).collect()
}
