//! Quadrature building blocks: Gauss-Legendre nodes on [-1, 1] and a
//! bisection-adaptive integrator for the regularized shift integrals.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached per order.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return Arc::clone(hit);
    }
    let computed = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, Arc::clone(&computed));
    computed
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Legendre order must be >= 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_pair(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss-Legendre integral of `f` over [a, b].
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, order: usize) -> f64 {
    let gl = gauss_legendre(order);
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    let mut acc = 0.0;
    for (&x, &w) in gl.0.iter().zip(gl.1.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

const ADAPT_ORDER: usize = 15;
const ADAPT_MAX_DEPTH: usize = 52;
/// Per-interval relative acceptance floor. Steep-but-smooth pieces (the
/// 1/z^3 kernel next to its cutoff) accept once locally converged instead of
/// chasing an absolute budget that shrank through bisection.
const ADAPT_REL_FLOOR: f64 = 5e-14;

/// Adaptive Gauss-Legendre integration by recursive bisection. An interval is
/// accepted when its one-shot GL estimate agrees with the two-half refinement
/// within its share of `tol` (absolute) or within `ADAPT_REL_FLOOR` of its
/// own magnitude.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("adaptive integration needs finite bounds".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let whole = integrate_gl(f, a, b, ADAPT_ORDER);
    adaptive_rec(f, a, b, whole, tol, 0)
}

fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = integrate_gl(f, a, mid, ADAPT_ORDER);
    let right = integrate_gl(f, mid, b, ADAPT_ORDER);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol || err <= ADAPT_REL_FLOOR * refined.abs() || mid == a || mid == b {
        return Ok(refined);
    }
    if depth >= ADAPT_MAX_DEPTH {
        return Err(Error::Precision {
            msg: format!("adaptive quadrature stalled on [{a}, {b}]"),
            partial: refined,
        });
    }
    let half_tol = 0.5 * tol;
    Ok(adaptive_rec(f, a, mid, left, half_tol, depth + 1)?
        + adaptive_rec(f, mid, b, right, half_tol, depth + 1)?)
}
