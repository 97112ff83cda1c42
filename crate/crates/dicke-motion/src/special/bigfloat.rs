//! Minimal arbitrary-precision binary floats on top of `num_bigint`.
//!
//! Just enough arithmetic (add, mul, division by machine floats) to sum
//! catastrophically cancelling series — the erf Taylor series and the 2F2
//! hypergeometric series at large negative argument — at a working precision
//! chosen from the size of the largest intermediate term. Not a general
//! purpose float: truncating rounding, no special values.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Value = `m * 2^e`, with `m` kept at or below the working precision.
#[derive(Debug, Clone)]
pub struct BigFloat {
    m: BigInt,
    e: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        Self { m: BigInt::zero(), e: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Exact conversion from a finite f64.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64 needs a finite value");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (mant, exp) = if biased == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        Self { m: BigInt::from(sign) * BigInt::from(mant), e: exp }
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        let (top, shift) = if bits > 63 {
            let s = bits - 63;
            ((&self.m >> s).to_i64().expect("63-bit window"), s)
        } else {
            (self.m.to_i64().expect("small mantissa"), 0)
        };
        ldexp(top as f64, self.e + shift)
    }

    /// Exponent of the most significant bit; i64::MIN for zero.
    pub fn mag(&self) -> i64 {
        if self.m.is_zero() {
            i64::MIN
        } else {
            self.e + self.m.bits() as i64
        }
    }

    fn normalize(mut self, prec: u64) -> Self {
        let bits = self.m.bits();
        if bits > prec {
            let s = (bits - prec) as i64;
            self.m >>= s;
            self.e += s;
        }
        self
    }

    pub fn neg(&self) -> Self {
        Self { m: -&self.m, e: self.e }
    }

    pub fn add(&self, other: &Self, prec: u64) -> Self {
        if self.m.is_zero() {
            return other.clone();
        }
        if other.m.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.e >= other.e { (self, other) } else { (other, self) };
        let shift = hi.e - lo.e;
        // the smaller operand cannot influence the rounded result
        if shift > (lo.m.bits() + prec + 64) as i64 && hi.mag() > lo.mag() + prec as i64 + 2 {
            return hi.clone();
        }
        let m = (&hi.m << shift) + &lo.m;
        Self { m, e: lo.e }.normalize(prec)
    }

    pub fn sub(&self, other: &Self, prec: u64) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u64) -> Self {
        Self { m: &self.m * &other.m, e: self.e + other.e }.normalize(prec)
    }

    pub fn mul_f64(&self, x: f64, prec: u64) -> Self {
        self.mul(&Self::from_f64(x), prec)
    }

    /// Division by a finite nonzero f64 (exact divisor).
    pub fn div_f64(&self, x: f64, prec: u64) -> Self {
        assert!(x.is_finite() && x != 0.0);
        let d = Self::from_f64(x);
        let extra = (prec + 64) as i64;
        let m = (&self.m << extra) / &d.m;
        Self { m, e: self.e - d.e - extra }.normalize(prec)
    }

    /// |self| < |other| * 2^-margin, treating zero as minus infinity.
    pub fn is_negligible_vs(&self, other: &Self, margin: i64) -> bool {
        self.mag() < other.mag().saturating_sub(margin)
    }
}

/// x * 2^n with saturation to 0 / +-inf outside the f64 range.
pub fn ldexp(x: f64, n: i64) -> f64 {
    let mut x = x;
    let mut n = n;
    while n > 0 && x != 0.0 && x.is_finite() {
        let s = n.min(512);
        x *= 2f64.powi(s as i32);
        n -= s;
    }
    while n < 0 && x != 0.0 {
        let s = (-n).min(512);
        x /= 2f64.powi(s as i32);
        n += s;
    }
    x
}

/// Complex number with BigFloat components.
#[derive(Debug, Clone)]
pub struct CBig {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl CBig {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re: BigFloat::from_f64(re), im: BigFloat::from_f64(im) }
    }

    pub fn zero() -> Self {
        Self { re: BigFloat::zero(), im: BigFloat::zero() }
    }

    pub fn add(&self, other: &Self, prec: u64) -> Self {
        Self { re: self.re.add(&other.re, prec), im: self.im.add(&other.im, prec) }
    }

    pub fn mul(&self, other: &Self, prec: u64) -> Self {
        let re = self.re.mul(&other.re, prec).sub(&self.im.mul(&other.im, prec), prec);
        let im = self.re.mul(&other.im, prec).add(&self.im.mul(&other.re, prec), prec);
        Self { re, im }
    }

    pub fn div_f64(&self, x: f64, prec: u64) -> Self {
        Self { re: self.re.div_f64(x, prec), im: self.im.div_f64(x, prec) }
    }

    pub fn mul_f64(&self, x: f64, prec: u64) -> Self {
        Self { re: self.re.mul_f64(x, prec), im: self.im.mul_f64(x, prec) }
    }

    /// Max of the component magnitudes (power-of-two exponent).
    pub fn mag(&self) -> i64 {
        self.re.mag().max(self.im.mag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const P: u64 = 192;

    #[test]
    fn roundtrip_f64() {
        for &x in &[0.0, 1.0, -1.5, 3.141592653589793, 1e-300, -2.2e300, 5e-324] {
            assert_eq!(BigFloat::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn arithmetic_matches_f64_when_exact() {
        let a = BigFloat::from_f64(1.25);
        let b = BigFloat::from_f64(-0.75);
        assert_eq!(a.add(&b, P).to_f64(), 0.5);
        assert_eq!(a.mul(&b, P).to_f64(), -0.9375);
        assert_eq!(a.div_f64(-0.5, P).to_f64(), -2.5);
    }

    #[test]
    fn cancellation_is_exact_at_working_precision() {
        // (1 + 2^-100) - 1 = 2^-100, impossible in f64
        let one = BigFloat::from_f64(1.0);
        let tiny = BigFloat::from_f64(ldexp(1.0, -100));
        let s = one.add(&tiny, P).sub(&one, P);
        assert_abs_diff_eq!(s.to_f64(), ldexp(1.0, -100), epsilon = 1e-45);
    }

    #[test]
    fn ldexp_saturates() {
        assert_eq!(ldexp(1.0, 20000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -20000), 0.0);
        assert_eq!(ldexp(1.5, 3), 12.0);
    }

    #[test]
    fn exp_series_in_bigfloat_beats_f64_cancellation() {
        // e^-30 by direct alternating Taylor summation: hopeless in f64,
        // accurate in BigFloat with enough working bits
        let prec = 256;
        let mut term = BigFloat::from_f64(1.0);
        let mut sum = BigFloat::from_f64(1.0);
        for k in 1..200 {
            term = term.mul_f64(-30.0, prec).div_f64(k as f64, prec);
            sum = sum.add(&term, prec);
        }
        assert_abs_diff_eq!(sum.to_f64() / (-30.0f64).exp(), 1.0, epsilon = 1e-12);
    }
}
