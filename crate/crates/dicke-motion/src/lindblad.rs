//! Master-equation assembly and time integration for the internal dynamics,
//!
//! ```text
//! d rho/dt = -i [H, rho] + sum_ij gamma_ij ( sm_j rho sp_i - 1/2 {sp_i sm_j, rho} ),
//! H = sum_{i != j} Delta_ij sp_i sm_j,
//! ```
//!
//! on the dense 2^N space (N <= 6), with an embedded Dormand-Prince 5(4)
//! integrator. The dissipator keeps the non-diagonalized gamma_ij form; time
//! is measured in units of 1/gamma0.

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron};
use ndarray::Array2;
use num_complex::Complex64;

/// Hard cap on atom number (dense 2^N representation).
pub const MAX_ATOMS: usize = 6;

type CMat = Array2<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Lowering operator of atom `j` on the 2^n space; atom j owns bit j, with
/// |0> the ground and |1> the excited level.
pub fn sigma_minus(n_atoms: usize, j: usize) -> CMat {
    let mut sm = Array2::zeros((2, 2));
    sm[(0, 1)] = c(1.0);
    let eye: CMat = Array2::eye(2);
    let mut op: CMat = Array2::eye(1);
    for bit in (0..n_atoms).rev() {
        op = kron(&op, if bit == j { &sm } else { &eye });
    }
    op
}

/// Dipole-dipole Hamiltonian sum_{i != j} Delta_ij sp_i sm_j (units gamma0,
/// hbar = 1). The shift matrix must be symmetric with zero diagonal.
pub fn build_hamiltonian(delta: &Array2<f64>) -> Result<CMat> {
    let n = delta.nrows();
    if delta.ncols() != n {
        return Err(Error::Dimension("shift matrix must be square".into()));
    }
    for i in 0..n {
        if delta[(i, i)] != 0.0 {
            return Err(Error::Domain("shift matrix must have zero diagonal".into()));
        }
        for j in 0..n {
            if (delta[(i, j)] - delta[(j, i)]).abs() > 1e-12 * delta[(i, j)].abs().max(1.0) {
                return Err(Error::Domain("shift matrix must be symmetric".into()));
            }
        }
    }
    let dim = 1 << n;
    let mut h: CMat = Array2::zeros((dim, dim));
    let sm: Vec<CMat> = (0..n).map(|j| sigma_minus(n, j)).collect();
    for i in 0..n {
        let sp_i = sm[i].t().mapv(|v| v.conj());
        for j in 0..n {
            if i == j || delta[(i, j)] == 0.0 {
                continue;
            }
            h = h + sp_i.dot(&sm[j]).mapv(|v| v * delta[(i, j)]);
        }
    }
    Ok(h)
}

/// Internal density matrix on the 2^N space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace.
    pub fn new(mat: CMat) -> Result<Self> {
        let dim = mat.nrows();
        if mat.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("density matrix dimension {dim} is not 2^N")));
        }
        let mut tr = Complex64::default();
        for i in 0..dim {
            tr += mat[(i, i)];
            for j in 0..dim {
                if (mat[(i, j)] - mat[(j, i)].conj()).norm() > 1e-12 {
                    return Err(Error::Domain("density matrix must be Hermitian".into()));
                }
            }
        }
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-12 {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        Ok(Self { mat })
    }

    pub fn n_atoms(&self) -> usize {
        self.mat.nrows().trailing_zeros() as usize
    }

    /// Pure state from a normalized amplitude vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let dim = psi.len();
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("state vector norm^2 {norm2} != 1")));
        }
        let mut mat = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Self::new(mat)
    }

    /// All atoms in the ground state.
    pub fn ground(n_atoms: usize) -> Self {
        let dim = 1 << n_atoms;
        let mut mat: CMat = Array2::zeros((dim, dim));
        mat[(0, 0)] = c(1.0);
        Self { mat }
    }

    /// Product state with the listed atoms excited.
    pub fn excited(n_atoms: usize, excited_atoms: &[usize]) -> Result<Self> {
        let dim = 1 << n_atoms;
        let mut idx = 0usize;
        for &a in excited_atoms {
            if a >= n_atoms {
                return Err(Error::Dimension(format!("atom {a} out of range")));
            }
            idx |= 1 << a;
        }
        let mut mat: CMat = Array2::zeros((dim, dim));
        mat[(idx, idx)] = c(1.0);
        Ok(Self { mat })
    }

    /// All atoms excited.
    pub fn all_excited(n_atoms: usize) -> Self {
        Self::excited(n_atoms, &(0..n_atoms).collect::<Vec<_>>()).expect("indices in range")
    }

    /// Symmetric single-excitation (W) state.
    pub fn symmetric_one_excitation(n_atoms: usize) -> Self {
        let dim = 1 << n_atoms;
        let amp = c(1.0 / (n_atoms as f64).sqrt());
        let mut psi = vec![Complex64::default(); dim];
        for a in 0..n_atoms {
            psi[1 << a] = amp;
        }
        Self::from_pure(&psi).expect("normalized by construction")
    }

    /// Antisymmetric single-excitation state of two atoms.
    pub fn antisymmetric_pair() -> Self {
        let s = 1.0 / 2.0f64.sqrt();
        let psi = vec![c(0.0), c(s), c(-s), c(0.0)];
        Self::from_pure(&psi).expect("normalized")
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.mat.nrows()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn purity(&self) -> f64 {
        let prod = self.mat.dot(&self.mat);
        (0..prod.nrows()).map(|i| prod[(i, i)].re).sum()
    }

    /// Smallest eigenvalue (positivity diagnostic).
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat).first().copied().unwrap_or(0.0)
    }
}

/// Precomputed operator set applying the master-equation generator.
pub struct LindbladGenerator {
    n_atoms: usize,
    h: CMat,
    sm: Vec<CMat>,
    /// b_j = sum_i gamma_ij sp_i.
    bp: Vec<CMat>,
    /// K = sum_ij gamma_ij sp_i sm_j.
    k: CMat,
    gamma: Array2<f64>,
}

impl LindbladGenerator {
    pub fn new(coeffs: &CoefficientSet) -> Result<Self> {
        let n = coeffs.gamma.nrows();
        if n > MAX_ATOMS {
            return Err(Error::Capacity(format!(
                "dense master equation supports N <= {MAX_ATOMS} (got {n})"
            )));
        }
        let h = build_hamiltonian(&coeffs.delta)?;
        let sm: Vec<CMat> = (0..n).map(|j| sigma_minus(n, j)).collect();
        let sp: Vec<CMat> = sm.iter().map(|m| m.t().mapv(|v| v.conj())).collect();
        let dim = 1 << n;
        let mut bp = Vec::with_capacity(n);
        let mut k: CMat = Array2::zeros((dim, dim));
        for j in 0..n {
            let mut b: CMat = Array2::zeros((dim, dim));
            for i in 0..n {
                let g = coeffs.gamma[(i, j)];
                if g != 0.0 {
                    b = b + sp[i].mapv(|v| v * g);
                }
            }
            k = k + b.dot(&sm[j]);
            bp.push(b);
        }
        Ok(Self { n_atoms: n, h, sm, bp, k, gamma: coeffs.gamma.clone() })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    /// d rho / dt.
    pub fn rhs(&self, rho: &CMat) -> CMat {
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = (self.h.dot(rho) - rho.dot(&self.h)).mapv(|v| v * minus_i);
        for j in 0..self.n_atoms {
            out = out + self.sm[j].dot(rho).dot(&self.bp[j]);
        }
        let krho = self.k.dot(rho);
        let rhok = rho.dot(&self.k);
        out - (krho + rhok).mapv(|v| v * 0.5)
    }

    /// Total photon emission rate sum_ij gamma_ij <sp_i sm_j> = Tr(K rho).
    pub fn emission_rate(&self, rho: &CMat) -> f64 {
        let prod = self.k.dot(rho);
        (0..prod.nrows()).map(|i| prod[(i, i)].re).sum()
    }

    pub fn gamma(&self) -> &Array2<f64> {
        &self.gamma
    }
}

/// Scalar observables of a state.
#[derive(Debug, Clone)]
pub struct ObservableRecord {
    /// Excited-state population of each atom.
    pub populations: Vec<f64>,
    /// Total photon emission rate, units gamma0.
    pub emission_rate: f64,
    /// Tr rho^2.
    pub purity: f64,
    pub trace: f64,
}

/// Per-atom populations, emission rate and purity.
pub fn observables(rho: &DensityMatrix, coeffs: &CoefficientSet) -> Result<ObservableRecord> {
    let n = coeffs.gamma.nrows();
    if rho.mat.nrows() != 1 << n {
        return Err(Error::Dimension(format!(
            "state dimension {} does not match {n} atoms",
            rho.mat.nrows()
        )));
    }
    let gen = LindbladGenerator::new(coeffs)?;
    Ok(observables_with(&gen, &rho.mat))
}

fn observables_with(gen: &LindbladGenerator, rho: &CMat) -> ObservableRecord {
    let n = gen.n_atoms;
    let dim = rho.nrows();
    // populations from the computational-basis diagonal
    let mut populations = vec![0.0; n];
    let mut trace = 0.0;
    for idx in 0..dim {
        let p = rho[(idx, idx)].re;
        trace += p;
        for (a, pop) in populations.iter_mut().enumerate() {
            if idx >> a & 1 == 1 {
                *pop += p;
            }
        }
    }
    let purity = {
        let prod = rho.dot(rho);
        (0..dim).map(|i| prod[(i, i)].re).sum()
    };
    ObservableRecord { populations, emission_rate: gen.emission_rate(rho), purity, trace }
}

/// Time evolution record at the requested snapshot times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<ObservableRecord>,
    /// Largest |Tr rho - 1| seen at any accepted step (logged, not corrected).
    pub max_trace_drift: f64,
    /// Smallest eigenvalue of the rate matrix, copied from the coefficients.
    pub min_gamma_eigenvalue: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

// Dormand-Prince 5(4) tableau; stage times are not needed (autonomous system)
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const ABS_TOL: f64 = 1e-12;

/// Integrate the master equation from `rho0` to `t_end` (units 1/gamma0)
/// with relative tolerance `reltol`, recording states and observables at
/// `snapshots` (strictly increasing, within (0, t_end]). The initial state is
/// always recorded at t = 0.
pub fn evolve(
    rho0: &DensityMatrix,
    coeffs: &CoefficientSet,
    t_end: f64,
    reltol: f64,
    snapshots: &[f64],
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be > 0 (got {t_end})")));
    }
    let gen = LindbladGenerator::new(coeffs)?;
    if rho0.mat.nrows() != 1 << gen.n_atoms {
        return Err(Error::Dimension(format!(
            "initial state dimension {} does not match {} atoms",
            rho0.mat.nrows(),
            gen.n_atoms
        )));
    }
    for w in snapshots.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("snapshot times must be strictly increasing".into()));
        }
    }
    if let (Some(&first), Some(&last)) = (snapshots.first(), snapshots.last()) {
        if first <= 0.0 || last > t_end * (1.0 + 1e-12) {
            return Err(Error::Domain("snapshots must lie in (0, t_end]".into()));
        }
    }

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut obs = vec![observables_with(&gen, &rho0.mat)];

    let mut rho = rho0.mat.clone();
    let mut t = 0.0;
    let mut h = (t_end / 1000.0).min(0.05);
    let h_floor = t_end * 1e-14;
    let mut k1 = gen.rhs(&rho); // FSAL
    let mut drift: f64 = 0.0;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut next_snap = 0usize;

    while t < t_end {
        let mut target = t_end;
        if next_snap < snapshots.len() {
            target = target.min(snapshots[next_snap]);
        }
        if t + h >= target {
            h = target - t;
        }

        // stages
        let mut ks: Vec<CMat> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for s in 0..6 {
            let mut y = rho.clone();
            for (j, kj) in ks.iter().enumerate() {
                let a = DP_A[s][j];
                if a != 0.0 {
                    y = y + kj.mapv(|v| v * (a * h));
                }
            }
            ks.push(gen.rhs(&y));
        }
        let mut y5 = rho.clone();
        let mut err: CMat = Array2::zeros(rho.dim());
        for (j, kj) in ks.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                y5 = y5 + kj.mapv(|v| v * (DP_B5[j] * h));
            }
            let db = DP_B5[j] - DP_B4[j];
            if db != 0.0 {
                err = err + kj.mapv(|v| v * (db * h));
            }
        }
        let mut err_norm: f64 = 0.0;
        for (e, y) in err.iter().zip(y5.iter()) {
            let scale = ABS_TOL + reltol * y.norm();
            err_norm = err_norm.max(e.norm() / scale);
        }

        if err_norm <= 1.0 {
            t += h;
            rho = y5;
            k1 = ks.pop().expect("7 stages"); // FSAL: k7 = f(y5)
            accepted += 1;
            let tr: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
            drift = drift.max((tr - 1.0).abs());
            if next_snap < snapshots.len() && (t - snapshots[next_snap]).abs() <= 1e-12 * t_end {
                times.push(snapshots[next_snap]);
                states.push(DensityMatrix { mat: rho.clone() });
                obs.push(observables_with(&gen, &rho));
                next_snap += 1;
            }
        } else {
            rejected += 1;
        }
        let factor = if err_norm > 0.0 { 0.9 * err_norm.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h < h_floor {
            return Err(Error::Stiffness(t));
        }
    }

    Ok(Trajectory {
        times,
        states,
        observables: obs,
        max_trace_drift: drift,
        min_gamma_eigenvalue: coeffs.meta.min_gamma_eigenvalue,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}
