//! Special functions backing the closed-form coefficient formulas: the real
//! part of erf at complex argument (with its exponentially scaled variant),
//! Hermite and generalized Laguerre polynomials, the exact Laguerre product
//! linearization, and the 2F2 hypergeometric series.

pub mod bigfloat;
mod erf;
mod hyp;
mod poly;

pub use erf::{erf_real, re_erf_complex, re_erf_scaled};
pub use hyp::{hyp2f2, MAX_TERMS};
pub use poly::{
    hermite, laguerre, laguerre_poly_rational, laguerre_product_coeffs, poly_mul_rational,
    poly_to_f64, LaguerreLinearization, MAX_LINEARIZATION_DEGREE,
};
