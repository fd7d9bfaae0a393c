//! Finite-dimensional spin-j kinematics.
//!
//! Basis vectors are the `J_z` eigenstates ordered by decreasing `m`, so index
//! `i` carries `m = j - i`. Spin lengths and magnetic quantum numbers are
//! stored as twice their value.
//!
//! The coherent state along `(theta, phi)` uses the amplitudes
//! `<m|theta,phi> = sqrt(C(2j, j+m)) cos^{j+m}(theta/2) sin^{j-m}(theta/2) e^{-i m phi}`,
//! and the Husimi and Glauber functions are taken with respect to these states.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra as na;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::special::{gauss_legendre, ln_binomial, ln_factorial, spherical_harmonic, wigner_3j_twice};

pub type Operator = na::DMatrix<C64>;
pub type Ket = na::DVector<C64>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Spin length `j`, held as the integer `2j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct SpinLength {
    twice: u32,
}

impl SpinLength {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::SpinLength(0));
        }
        Ok(Self { twice })
    }

    pub fn new(j: f64) -> Result<Self> {
        let t = crate::special::twice(j)?;
        if t < 1 || t > u32::MAX as i64 {
            return Err(Error::SpinLength(t));
        }
        Ok(Self { twice: t as u32 })
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn j(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_integer(&self) -> bool {
        self.twice % 2 == 0
    }

    /// Twice the magnetic quantum number at basis index `i`.
    pub fn twice_m(&self, i: usize) -> i64 {
        self.twice as i64 - 2 * i as i64
    }

    /// Magnetic quantum number at basis index `i`.
    pub fn m(&self, i: usize) -> f64 {
        self.twice_m(i) as f64 / 2.0
    }

    /// Basis index of the magnetic number `m`, if it belongs to the spectrum.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let tm = crate::special::twice(m).ok()?;
        let i = self.twice as i64 - tm;
        if i < 0 || i % 2 != 0 || i / 2 >= self.dim() as i64 {
            return None;
        }
        Some((i / 2) as usize)
    }

    pub fn ms(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(move |i| self.m(i))
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Direction { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    pub const NORTH: Direction = Direction { theta: 0.0, phi: 0.0 };
    pub const SOUTH: Direction = Direction { theta: PI, phi: 0.0 };

    /// Build from a (not necessarily normalized) Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
        let phi = if phi >= 2.0 * PI { 0.0 } else { phi };
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Angle between two directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let c = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
        let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        c.atan2(d)
    }
}

/// Pure amplitude vector or density matrix over the `J_z` basis.
#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(Ket),
    Mixed(Operator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub j: SpinLength,
    pub repr: StateRepr,
}

impl SpinState {
    pub fn pure(j: SpinLength, amp: Ket) -> Result<Self> {
        if amp.len() != j.dim() {
            return Err(Error::Dimension { expected: j.dim(), got: amp.len() });
        }
        let n = amp.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { j, repr: StateRepr::Pure(amp) })
    }

    /// Normalize `amp` and wrap it.
    pub fn pure_normalized(j: SpinLength, amp: Ket) -> Result<Self> {
        let n = amp.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Self::pure(j, amp.unscale(n))
    }

    pub fn mixed(j: SpinLength, rho: Operator) -> Result<Self> {
        if rho.nrows() != j.dim() || rho.ncols() != j.dim() {
            return Err(Error::Dimension { expected: j.dim(), got: rho.nrows() });
        }
        if !is_hermitian(&rho, 1e-12) {
            return Err(Error::Parameter("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotNormalized(tr.re));
        }
        let ev = na::SymmetricEigen::new(rho.clone()).eigenvalues;
        if ev.iter().any(|&e| e < -1e-10) {
            return Err(Error::Parameter("density matrix has negative eigenvalues".into()));
        }
        Ok(Self { j, repr: StateRepr::Mixed(rho) })
    }

    pub fn maximally_mixed(j: SpinLength) -> Self {
        let d = j.dim();
        let rho = Operator::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0));
        Self { j, repr: StateRepr::Mixed(rho) }
    }

    /// The `J_z` eigenstate `|m>`.
    pub fn basis(j: SpinLength, m: f64) -> Result<Self> {
        let i = j.index_of(m).ok_or_else(|| Error::Parameter(format!("m = {m} not in spectrum of j = {}", j.j())))?;
        let mut v = Ket::zeros(j.dim());
        v[i] = ONE;
        Ok(Self { j, repr: StateRepr::Pure(v) })
    }

    pub fn density(&self) -> Operator {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Mixed(r) => r.clone(),
        }
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        match &self.repr {
            StateRepr::Pure(v) => v.dotc(&(op * v)),
            StateRepr::Mixed(r) => (r * op).trace(),
        }
    }

    /// Apply a unitary: `U|psi>` or `U rho U^dag`.
    pub fn evolve(&self, u: &Operator) -> Self {
        let repr = match &self.repr {
            StateRepr::Pure(v) => StateRepr::Pure(u * v),
            StateRepr::Mixed(r) => StateRepr::Mixed(u * r * u.adjoint()),
        };
        Self { j: self.j, repr }
    }

    /// Pure-state decomposition `rho = sum_k w_k |psi_k><psi_k|`, dropping
    /// weights below `1e-15`.
    pub fn ensemble(&self) -> Vec<(f64, Ket)> {
        match &self.repr {
            StateRepr::Pure(v) => vec![(1.0, v.clone())],
            StateRepr::Mixed(r) => {
                let d = r.nrows();
                let offdiag = (0..d).any(|a| (0..d).any(|b| a != b && r[(a, b)].norm() > 0.0));
                if !offdiag {
                    return (0..d)
                        .filter(|&i| r[(i, i)].re > 1e-15)
                        .map(|i| {
                            let mut v = Ket::zeros(d);
                            v[i] = ONE;
                            (r[(i, i)].re, v)
                        })
                        .collect();
                }
                let eig = na::SymmetricEigen::new(r.clone());
                (0..d)
                    .filter(|&k| eig.eigenvalues[k] > 1e-15)
                    .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned()))
                    .collect()
            }
        }
    }

    pub fn fidelity_with_pure(&self, psi: &Ket) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.dotc(psi).norm_sqr(),
            StateRepr::Mixed(r) => psi.dotc(&(r * psi)).re,
        }
    }
}

pub fn is_hermitian(op: &Operator, tol: f64) -> bool {
    op.nrows() == op.ncols() && (op - op.adjoint()).iter().all(|z| z.norm() <= tol)
}

pub fn is_unitary(op: &Operator, tol: f64) -> bool {
    let d = op.nrows();
    let p = op.adjoint() * op;
    (p - Operator::identity(d, d)).iter().all(|z| z.norm() <= tol)
}

/// The Cartesian spin components and the Casimir.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
    pub jsq: Operator,
}

impl SpinOperators {
    /// `n . J` for the unit vector of `dir`.
    pub fn along(&self, dir: &Direction) -> Operator {
        let n = dir.unit_vector();
        self.jx.scale(n[0]) + self.jy.scale(n[1]) + self.jz.scale(n[2])
    }
}

/// Matrix elements `<m+1|J_+|m>` indexed by the lower basis index.
fn ladder_elements(j: SpinLength) -> Vec<f64> {
    let jj = j.j();
    (1..j.dim())
        .map(|i| {
            let m = j.m(i);
            (jj * (jj + 1.0) - m * (m + 1.0)).sqrt()
        })
        .collect()
}

pub fn build_spin_operators(j: SpinLength) -> SpinOperators {
    let d = j.dim();
    let mut jx = Operator::zeros(d, d);
    let mut jy = Operator::zeros(d, d);
    let jz = Operator::from_diagonal(&Ket::from_iterator(d, j.ms().map(|m| C64::new(m, 0.0))));
    for (k, c) in ladder_elements(j).into_iter().enumerate() {
        // J_+ maps index k+1 (m) to index k (m+1).
        jx[(k, k + 1)] = C64::new(c / 2.0, 0.0);
        jx[(k + 1, k)] = C64::new(c / 2.0, 0.0);
        jy[(k, k + 1)] = C64::new(0.0, -c / 2.0);
        jy[(k + 1, k)] = C64::new(0.0, c / 2.0);
    }
    let jsq = &jx * &jx + &jy * &jy + &jz * &jz;
    SpinOperators { jx, jy, jz, jsq }
}

/// Real amplitudes `a_i(theta)` such that `<m_i|theta,phi> = a_i e^{-i m_i phi}`.
pub fn coherent_profile(j: SpinLength, theta: f64) -> Vec<f64> {
    let tj = j.twice() as u64;
    let (s, c) = (theta / 2.0).sin_cos();
    let (ls, lc) = (s.abs().ln(), c.abs().ln());
    (0..j.dim())
        .map(|i| {
            let up = tj - i as u64; // j + m
            let down = i as u64; // j - m
            let mut la = 0.5 * ln_binomial(tj, up);
            let mut sign = 1.0;
            if up > 0 {
                if c == 0.0 {
                    return 0.0;
                }
                la += up as f64 * lc;
                if c < 0.0 && up % 2 == 1 {
                    sign = -sign;
                }
            }
            if down > 0 {
                if s == 0.0 {
                    return 0.0;
                }
                la += down as f64 * ls;
                if s < 0.0 && down % 2 == 1 {
                    sign = -sign;
                }
            }
            sign * la.exp()
        })
        .collect()
}

pub fn coherent_ket(j: SpinLength, dir: &Direction) -> Ket {
    let a = coherent_profile(j, dir.theta);
    Ket::from_iterator(
        j.dim(),
        a.iter().enumerate().map(|(i, &ai)| C64::from_polar(ai, -j.m(i) * dir.phi)),
    )
}

pub fn coherent_state(j: SpinLength, dir: &Direction) -> SpinState {
    SpinState { j, repr: StateRepr::Pure(coherent_ket(j, dir)) }
}

/// `|<a|b>|^2 = cos^{4j}(Theta/2)` for coherent states separated by `Theta`.
pub fn coherent_overlap_sq(j: SpinLength, a: &Direction, b: &Direction) -> f64 {
    (a.angle_to(b) / 2.0).cos().powf(2.0 * j.twice() as f64)
}

/// Eigendecomposition `J_x = V diag(m) V^T` with exact half-integer eigenvalues.
#[derive(Debug)]
pub struct JxEigen {
    pub values: Vec<f64>,
    pub vectors: na::DMatrix<f64>,
}

fn jx_cache() -> &'static Mutex<HashMap<u32, Arc<JxEigen>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<JxEigen>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn jx_eigen(j: SpinLength) -> Arc<JxEigen> {
    if let Some(e) = jx_cache().lock().expect("cache poisoned").get(&j.twice()) {
        return e.clone();
    }
    let d = j.dim();
    let mut jx = na::DMatrix::<f64>::zeros(d, d);
    for (k, c) in ladder_elements(j).into_iter().enumerate() {
        jx[(k, k + 1)] = c / 2.0;
        jx[(k + 1, k)] = c / 2.0;
    }
    let eig = na::SymmetricEigen::new(jx);
    let values = eig.eigenvalues.iter().map(|&v| (2.0 * v).round() / 2.0).collect();
    let e = Arc::new(JxEigen { values, vectors: eig.eigenvectors });
    jx_cache().lock().expect("cache poisoned").insert(j.twice(), e.clone());
    e
}

/// `U = exp(-i omega_t J_x)`.
pub fn rotation_evolution(j: SpinLength, omega_t: f64) -> Operator {
    let e = jx_eigen(j);
    let d = j.dim();
    let v = e.vectors.map(|x| C64::new(x, 0.0));
    let mut vp = v.clone();
    for (k, &lam) in e.values.iter().enumerate() {
        let ph = C64::from_polar(1.0, -omega_t * lam);
                for r in 0..d {
            vp[(r, k)] *= ph;
        }
    }
    vp * v.transpose()
}

/// Direction reached by rotating `dir` about the x axis through `omega_t`,
/// matching the action of [`rotation_evolution`] on coherent states.
pub fn rotated_direction(dir: &Direction, omega_t: f64) -> Direction {
    let [x, y, z] = dir.unit_vector();
    let (s, c) = omega_t.sin_cos();
    Direction::from_vector([x, y * c - z * s, y * s + z * c])
}

/// Parity `A = diag((-1)^{j-m})`.
pub fn parity_operator(j: SpinLength) -> Operator {
    Operator::from_diagonal(&Ket::from_iterator(
        j.dim(),
        (0..j.dim()).map(|i| if i % 2 == 0 { ONE } else { -ONE }),
    ))
}

/// Born probabilities over the `J_z` basis (index order, `m = j - i`).
pub fn outcome_distribution(state: &SpinState) -> Vec<f64> {
    match &state.repr {
        StateRepr::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
        StateRepr::Mixed(r) => (0..r.nrows()).map(|i| r[(i, i)].re.max(0.0)).collect(),
    }
}

/// Mean and standard deviation of the Gaussian approximating the `J_z`
/// statistics of a coherent state at polar angle `theta_t`.
pub fn gaussian_approx(j: SpinLength, theta_t: f64) -> (f64, f64) {
    let jj = j.j();
    (jj * theta_t.cos(), (jj / 2.0).sqrt() * theta_t.sin().abs())
}

/// Total-variation distance between the `J_z` law of the coherent state at
/// `theta_t` and the Gaussian of [`gaussian_approx`] discretized on the
/// lattice of `m` values and renormalized there.
pub fn gaussian_tv_distance(j: SpinLength, theta_t: f64) -> f64 {
    let exact = outcome_distribution(&coherent_state(j, &Direction { theta: theta_t, phi: 0.0 }));
    let (mu, sigma) = gaussian_approx(j, theta_t);
    let g: Vec<f64> = if sigma == 0.0 {
        let nearest = (0..j.dim())
            .min_by(|&a, &b| (j.m(a) - mu).abs().total_cmp(&(j.m(b) - mu).abs()))
            .unwrap_or(0);
        (0..j.dim()).map(|i| if i == nearest { 1.0 } else { 0.0 }).collect()
    } else {
        let raw: Vec<f64> = j.ms().map(|m| (-(m - mu).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    };
    0.5 * exact.iter().zip(&g).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Husimi function `Q(Omega) = (2j+1)/(4 pi) <Omega|rho|Omega>`.
pub fn q_function(state: &SpinState, dir: &Direction) -> f64 {
    let c = coherent_ket(state.j, dir);
    let pref = state.j.dim() as f64 / (4.0 * PI);
    pref * state.fidelity_with_pure(&c)
}

/// Product grid: Gauss-Legendre in `cos theta` times the trapezoid rule in
/// `phi`. Values on the grid are stored row-major, theta outer.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub cos_theta: Vec<f64>,
    pub w_theta: Vec<f64>,
    pub n_phi: usize,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        Self { cos_theta: x, w_theta: w, n_phi }
    }

    /// The smallest grid integrating every `Q` of spin `j` exactly:
    /// order `2j+2` in `cos theta`, `4j+4` azimuthal points.
    pub fn for_spin(j: SpinLength) -> Self {
        Self::new(j.twice() as usize + 2, 2 * j.twice() as usize + 4)
    }

    /// Same construction with both resolutions multiplied by `factor`.
    pub fn for_spin_refined(j: SpinLength, factor: usize) -> Self {
        Self::new(factor * (j.twice() as usize + 2), factor * (2 * j.twice() as usize + 4))
    }

    pub fn len(&self) -> usize {
        self.cos_theta.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, p: usize) -> f64 {
        2.0 * PI * p as f64 / self.n_phi as f64
    }

    pub fn direction(&self, idx: usize) -> Direction {
        let (t, p) = (idx / self.n_phi, idx % self.n_phi);
        Direction { theta: self.cos_theta[t].clamp(-1.0, 1.0).acos(), phi: self.phi(p) }
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.w_theta[idx / self.n_phi] * 2.0 * PI / self.n_phi as f64
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().enumerate().map(|(i, v)| v * self.weight(i)).sum()
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        (0..self.len()).map(move |i| self.direction(i))
    }
}

/// `|<Omega|psi>|^2` on every grid point, using one FFT per polar node.
pub fn coherent_overlaps_on_grid(j: SpinLength, psi: &Ket, grid: &SphereGrid) -> Vec<f64> {
    let d = j.dim();
    let np = grid.n_phi;
    assert!(np >= d, "azimuthal grid too coarse for spin length");
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(np);
    let mut out = vec![0.0; grid.len()];
    let mut buf = vec![ZERO; np];
    for (t, &ct) in grid.cos_theta.iter().enumerate() {
        let a = coherent_profile(j, ct.clamp(-1.0, 1.0).acos());
        buf.iter_mut().for_each(|z| *z = ZERO);
        // <Omega|psi> = e^{-i j phi} sum_n a psi e^{i n phi}, n = j + m = 2j - i.
        for i in 0..d {
            buf[d - 1 - i] = a[i] * psi[i];
        }
        fft.process(&mut buf);
        for p in 0..np {
            out[t * np + p] = buf[p].norm_sqr();
        }
    }
    out
}

/// `Q` sampled on a grid.
pub fn q_on_grid(state: &SpinState, grid: &SphereGrid) -> Vec<f64> {
    let pref = state.j.dim() as f64 / (4.0 * PI);
    let mut q = vec![0.0; grid.len()];
    for (w, psi) in state.ensemble() {
        let o = coherent_overlaps_on_grid(state.j, &psi, grid);
        q.iter_mut().zip(o).for_each(|(qi, oi)| *qi += pref * w * oi);
    }
    q
}

/// Bhattacharyya overlap `int sqrt(f g) d^2 Omega` of two densities sampled
/// on the same grid.
pub fn bhattacharyya_overlap(grid: &SphereGrid, qa: &[f64], qb: &[f64], tol: f64) -> Result<f64> {
    if qa.len() != grid.len() || qb.len() != grid.len() {
        return Err(Error::Dimension { expected: grid.len(), got: qa.len().min(qb.len()) });
    }
    for q in [qa, qb] {
        let n = grid.integrate(q);
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n));
        }
    }
    let s: f64 = qa
        .iter()
        .zip(qb)
        .enumerate()
        .map(|(i, (a, b))| (a.max(0.0) * b.max(0.0)).sqrt() * grid.weight(i))
        .sum();
    Ok(s.min(1.0))
}

/// Multipole coefficients of the Glauber function,
/// `P(Omega) = sum_{k,q} rho_kq Y_kq(Omega) sqrt((2j-k)!(2j+k+1)!) / (sqrt(4 pi) (2j)!)`.
///
/// With Condon-Shortley harmonics and the coherent states of this module no
/// extra `(-1)^{k-q}` factor appears; including it breaks the reconstruction
/// `rho = int P |Omega><Omega|`.
#[derive(Debug, Clone)]
pub struct PExpansion {
    pub j: SpinLength,
    /// `coef[k][q + k]` already multiplied by the k-dependent prefactor.
    pub coef: Vec<Vec<C64>>,
}

pub const P_FUNCTION_MAX_J: f64 = 30.0;

pub fn p_expansion(state: &SpinState) -> Result<PExpansion> {
    let j = state.j;
    if j.j() > P_FUNCTION_MAX_J {
        return Err(Error::UnstableRange(j.j()));
    }
    let rho = state.density();
    let tj = j.twice() as i64;
    let ln_2j = ln_factorial(tj as u64);
    let mut coef = Vec::with_capacity(tj as usize + 1);
    for k in 0..=tj {
        let pref = (0.5 * (ln_factorial((tj - k) as u64) + ln_factorial((tj + k + 1) as u64)) - ln_2j).exp()
            / (4.0 * PI).sqrt();
        let mut row = Vec::with_capacity(2 * k as usize + 1);
        for q in -k..=k {
            // rho_kq = sqrt(2k+1) sum_m (-1)^{j-m} <m|rho|m-q> (j k j; -m+q, -q, m)
            let mut s = ZERO;
            for i in 0..j.dim() {
                let tm = j.twice_m(i);
                let i2 = i as i64 + q; // m - q
                if i2 < 0 || i2 >= j.dim() as i64 {
                    continue;
                }
                let w = wigner_3j_twice(tj, 2 * k, tj, -tm + 2 * q, -2 * q, tm);
                if w == 0.0 {
                    continue;
                }
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                s += rho[(i, i2 as usize)] * (sign * w);
            }
            row.push(s * (((2 * k + 1) as f64).sqrt() * pref));
        }
        coef.push(row);
    }
    Ok(PExpansion { j, coef })
}

impl PExpansion {
    pub fn eval(&self, dir: &Direction) -> C64 {
        let mut s = ZERO;
        for (k, row) in self.coef.iter().enumerate() {
            let k = k as i64;
            for (qi, c) in row.iter().enumerate() {
                let q = qi as i64 - k;
                s += c * spherical_harmonic(k as u32, q as i32, dir.theta, dir.phi);
            }
        }
        s
    }
}

/// Glauber-Sudarshan function `P(Omega)`; the imaginary residue is dropped.
pub fn p_function(state: &SpinState, dir: &Direction) -> Result<f64> {
    Ok(p_expansion(state)?.eval(dir).re)
}

/// Rebuild `rho = int P(Omega) |Omega><Omega| d^2 Omega` on a grid that is
/// exact for the band-limited integrand.
pub fn reconstruct_from_p(p: &PExpansion) -> Operator {
    let j = p.j;
    let grid = SphereGrid::new(2 * j.twice() as usize + 2, 4 * j.twice() as usize + 4);
    let d = j.dim();
    let mut rho = Operator::zeros(d, d);
    for idx in 0..grid.len() {
        let dir = grid.direction(idx);
        let w = p.eval(&dir) * grid.weight(idx);
        let c = coherent_ket(j, &dir);
        rho += (&c * c.adjoint()) * w;
    }
    rho
}


/// Something that produces the propagator `U(t)` of a time-independent
/// generator.
pub trait Evolution: Sync {
    fn dim(&self) -> usize;
    fn propagator(&self, t: f64) -> Operator;
}

/// Precession `H = omega J_x`.
#[derive(Debug, Clone, Copy)]
pub struct RotationX {
    pub j: SpinLength,
    pub omega: f64,
}

impl Evolution for RotationX {
    fn dim(&self) -> usize {
        self.j.dim()
    }

    fn propagator(&self, t: f64) -> Operator {
        rotation_evolution(self.j, self.omega * t)
    }
}

/// A Hermitian generator, diagonalized once.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub energies: Vec<f64>,
    pub states: Operator,
}

impl Hamiltonian {
    pub fn new(h: &Operator) -> Result<Self> {
        if !is_hermitian(h, 1e-10) {
            return Err(Error::Parameter("generator is not Hermitian".into()));
        }
        let eig = na::SymmetricEigen::new(h.clone());
        Ok(Self { energies: eig.eigenvalues.iter().copied().collect(), states: eig.eigenvectors })
    }
}

impl Evolution for Hamiltonian {
    fn dim(&self) -> usize {
        self.energies.len()
    }

    fn propagator(&self, t: f64) -> Operator {
        let mut vp = self.states.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let ph = C64::from_polar(1.0, -e * t);
            vp.column_mut(k).iter_mut().for_each(|z| *z *= ph);
        }
        vp * self.states.adjoint()
    }
}
