//! Real part of the error function of a complex argument, plus the
//! exponentially scaled combination the Gaussian closed formula needs.
//!
//! Two branches: a Taylor series summed in extended precision for |z| <= 12
//! (the alternating terms grow to ~e^{|z|^2} before the sum collapses), and
//! the large-|z| asymptotic expansion of erfc beyond. The scaled form
//! `e^{-b^2} Re erf(a + ib)` stays bounded for every (a, b) and is what the
//! decay-rate formula consumes; the unscaled value overflows f64 once
//! b^2 - a^2 > ~709 and saturates to +-inf there.

use super::bigfloat::CBig;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_SQRT_PI, PI};

/// Branch switch radius. Verified by the overlap-ring agreement test.
const TAYLOR_RADIUS: f64 = 12.0;

/// Re{erf(a + ib)}. Absolute accuracy ~1e-13 for order-one results, relative
/// ~1e-13 for large ones; +-inf once the true value exceeds the f64 range.
pub fn re_erf_complex(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a.is_infinite() || b.is_infinite() {
        return Err(Error::Domain(format!("re_erf_complex needs finite input ({a}, {b})")));
    }
    // erf(-z) = -erf(z), erf(conj z) = conj(erf z)  =>  Re is odd in a, even in b
    let sign = if a < 0.0 { -1.0 } else { 1.0 };
    let (a, b) = (a.abs(), b.abs());
    if a == 0.0 {
        return Ok(0.0); // erf(ib) is purely imaginary
    }
    let val = if a.hypot(b) <= TAYLOR_RADIUS {
        taylor_series(a, b).0
    } else {
        // erf = 1 - e^{b^2-a^2} * t with t = Re{e^{-2iab} S(z)/(z sqrt(pi))};
        // the prefactor alone can overflow even when the product does not, so
        // recombine through logarithms once the exponent gets large
        let t = asymptotic_tail(a, b).scaled_tail;
        let expo = b * b - a * a;
        if expo > 700.0 {
            if t == 0.0 {
                1.0
            } else {
                let log_mag = expo + t.abs().ln();
                if log_mag > 709.78 {
                    -t.signum() * f64::INFINITY
                } else {
                    1.0 - t.signum() * log_mag.exp()
                }
            }
        } else {
            1.0 - expo.exp() * t
        }
    };
    Ok(sign * val)
}

/// e^{-b^2} Re{erf(a + ib)}: bounded for all finite (a, b).
pub fn re_erf_scaled(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a.is_infinite() || b.is_infinite() {
        return Err(Error::Domain(format!("re_erf_scaled needs finite input ({a}, {b})")));
    }
    let sign = if a < 0.0 { -1.0 } else { 1.0 };
    let (a, b) = (a.abs(), b.abs());
    if a == 0.0 {
        return Ok(0.0);
    }
    let val = if a.hypot(b) <= TAYLOR_RADIUS {
        // e^{-b^2} >= e^{-144}: representable, and the product stays in range
        (-b * b).exp() * taylor_series(a, b).0
    } else {
        let t = asymptotic_tail(a, b);
        (-b * b).exp() - (-a * a).exp() * t.scaled_tail
    };
    Ok(sign * val)
}

/// Real error function, via the same two branches.
pub fn erf_real(x: f64) -> f64 {
    re_erf_complex(x, 0.0).expect("finite input")
}

/// (Re erf, Im erf-ignored) by the alternating Taylor series
/// erf(z) = (2/sqrt(pi)) sum (-1)^n z^{2n+1} / (n! (2n+1)),
/// summed in extended precision sized to the largest term ~ e^{|z|^2}.
fn taylor_series(a: f64, b: f64) -> (f64, f64) {
    let r2 = a * a + b * b;
    let prec = 160 + (1.5 * r2) as u64; // max term ~ 1.443 r^2 bits
    let z = CBig::new(a, b);
    let z2 = z.mul(&z, prec);
    let mut term = z.clone(); // z^{2n+1}/n!
    let mut sum = z.clone();
    let mut peak = term.mag();
    for n in 1..2500 {
        term = term.mul(&z2, prec).div_f64(-(n as f64), prec);
        let contrib = term.div_f64(2.0 * n as f64 + 1.0, prec);
        sum = sum.add(&contrib, prec);
        peak = peak.max(term.mag());
        if term.mag() < peak - prec as i64 + 20 {
            break;
        }
    }
    (FRAC_2_SQRT_PI * sum.re.to_f64(), FRAC_2_SQRT_PI * sum.im.to_f64())
}

struct Tail {
    /// Re{ e^{-2iab} S(z) / (z sqrt(pi)) } where
    /// S(z) = sum_m (-1)^m (2m-1)!! / (2 z^2)^m
    scaled_tail: f64,
}

fn asymptotic_tail(a: f64, b: f64) -> Tail {
    let z = Complex64::new(a, b);
    let inv_2z2 = 0.5 / (z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut s = term;
    let mut last = f64::INFINITY;
    for m in 1..60 {
        term *= -(2.0 * m as f64 - 1.0) * inv_2z2;
        let mag = term.norm_sqr();
        if mag >= last {
            break; // divergent tail of the asymptotic series
        }
        s += term;
        last = mag;
        if mag < 1e-36 * s.norm_sqr() {
            break;
        }
    }
    let phase = Complex64::from_polar(1.0, -2.0 * a * b);
    let val = (phase * s / (z * PI.sqrt())).re;
    Tail { scaled_tail: val }
}
