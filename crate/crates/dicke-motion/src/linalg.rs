//! Small dense linear-algebra helpers: cyclic Jacobi eigenvalues for real
//! symmetric matrices (the N x N rate matrix, N <= 6), Hermitian eigenvalues
//! through the real symmetric embedding, and Kronecker products for building
//! N-qubit operators.

use ndarray::Array2;
use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix by the cyclic Jacobi method,
/// returned in ascending order.
pub fn sym_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Eigenvalues of a Hermitian matrix H = A + iB via the doubled real
/// symmetric matrix [[A, -B], [B, A]], whose spectrum is that of H with
/// every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &Array2<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    assert_eq!(n, h.ncols());
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            big[i][j] = h[(i, j)].re;
            big[n + i][n + j] = h[(i, j)].re;
            big[i][n + j] = -h[(i, j)].im;
            big[n + i][j] = h[(i, j)].im;
        }
    }
    let eigs = sym_eigenvalues(&big);
    // doubled spectrum: take every second value
    eigs.into_iter().step_by(2).collect()
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_on_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let eigs = sym_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert_abs_diff_eq!(eigs[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_preserves_trace_and_handles_rank_deficiency() {
        let m = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ];
        let eigs = sym_eigenvalues(&m);
        assert_abs_diff_eq!(eigs[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_y() {
        let mut h = Array2::zeros((2, 2));
        h[(0, 1)] = Complex64::new(0.0, -1.0);
        h[(1, 0)] = Complex64::new(0.0, 1.0);
        let eigs = hermitian_eigenvalues(&h);
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kron_identity_structure() {
        let eye: Array2<Complex64> = Array2::eye(2);
        let mut sx = Array2::zeros((2, 2));
        sx[(0, 1)] = Complex64::new(1.0, 0.0);
        sx[(1, 0)] = Complex64::new(1.0, 0.0);
        let k = kron(&eye, &sx);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(k[(2, 3)], Complex64::new(1.0, 0.0));
        assert_eq!(k[(0, 3)], Complex64::new(0.0, 0.0));
    }
}
