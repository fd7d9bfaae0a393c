//! Collective entanglement between two (or M) spin-1/2 ensembles.
//!
//! Only the collective spins `S^A = (1/2) sum sigma^(alpha)` and their
//! correlations are measured. The normalized moments `s^a = (2/n) <S^A>` and
//! `t^ab = (4/n^2) <S^A_i S^B_j>` are the Bloch data of a two-qubit state, the
//! virtual pair `rho_ab`, which equals the uniform mixture of all `n^2`
//! physical pair states. Its negativity lower-bounds the average pairwise
//! negativity.
//!
//! Qubit registers are ordered with qubit 0 as the most significant bit, and
//! `sigma_z |0> = |0>`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{build_spin_operators, Operator, SpinLength};
use crate::C64;

/// Largest register handled by dense routines.
pub const MAX_QUBITS: usize = 12;
/// Largest number of virtual qubits in `multipartite_virtual`.
pub const MAX_VIRTUAL_QUBITS: usize = 6;

const PSD_TOL: f64 = 1e-10;
const STATE_TOL: f64 = 1e-10;

/// `sigma_i` with `sigma_0 = 1`.
pub fn pauli(i: usize) -> Operator {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let v = match i {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -im, im, z],
        3 => [o, z, z, -o],
        _ => panic!("Pauli index {i} out of range"),
    };
    Operator::from_row_slice(2, 2, &v)
}

/// Bit flip and phase of a Pauli string on a basis state: `P|x> = phase |x ^ flip>`.
fn pauli_action(ops: &[(usize, usize)], n_qubits: usize, x: usize) -> (usize, C64) {
    let mut flip = 0;
    let mut phase = C64::new(1.0, 0.0);
    for &(q, p) in ops {
        let mask = 1 << (n_qubits - 1 - q);
        let bit = x & mask != 0;
        match p {
            0 => {}
            1 => flip ^= mask,
            2 => {
                flip ^= mask;
                phase *= if bit { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
            }
            3 => {
                if bit {
                    phase = -phase;
                }
            }
            _ => panic!("Pauli index {p} out of range"),
        }
    }
    (flip, phase)
}

/// `Tr[rho P]` for the Pauli string `ops = [(qubit, index), ...]`.
pub fn pauli_expectation(rho: &Operator, n_qubits: usize, ops: &[(usize, usize)]) -> C64 {
    (0..rho.nrows())
        .map(|x| {
            let (flip, phase) = pauli_action(ops, n_qubits, x);
            rho[(x, x ^ flip)] * phase
        })
        .sum()
}

fn check_register(rho: &Operator, n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Parameter(format!("register of {n_qubits} qubits outside 1..={MAX_QUBITS}")));
    }
    let d = 1 << n_qubits;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::Dimension { expected: d, got: rho.nrows() });
    }
    Ok(())
}

fn min_eigenvalue(rho: &Operator) -> f64 {
    SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_density(rho: &Operator, what: &str) -> Result<()> {
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > STATE_TOL {
        return Err(Error::Parameter(format!("{what} is not Hermitian ({herm:e})")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::NotNormalized(tr.re));
    }
    let lo = min_eigenvalue(rho);
    if lo < -PSD_TOL {
        return Err(Error::Parameter(format!("{what} has eigenvalue {lo:e}")));
    }
    Ok(())
}

/// Two-qubit density matrix, first factor is qubit `a` (or `alpha`).
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    rho: Operator,
}

/// Bloch data `rho = (1/4)[1 + g^a.sigma x 1 + 1 x g^b.sigma + sum h_kl sigma_k x sigma_l]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCoefficients {
    pub g_a: [f64; 3],
    pub g_b: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl PairState {
    pub fn new(rho: Operator) -> Result<Self> {
        if rho.nrows() != 4 || rho.ncols() != 4 {
            return Err(Error::Dimension { expected: 4, got: rho.nrows() });
        }
        check_density(&rho, "pair state")?;
        Ok(Self { rho })
    }

    pub fn from_coefficients(c: &PairCoefficients) -> Result<Self> {
        Self::new(bloch_matrix(c))
    }

    pub fn pure(psi: &[C64; 4]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::new(&v * v.adjoint())
    }

    pub fn matrix(&self) -> &Operator {
        &self.rho
    }

    pub fn coefficients(&self) -> PairCoefficients {
        let e = |i: usize, j: usize| {
            let mut ops = Vec::with_capacity(2);
            if i > 0 {
                ops.push((0, i));
            }
            if j > 0 {
                ops.push((1, j));
            }
            pauli_expectation(&self.rho, 2, &ops).re
        };
        let mut c = PairCoefficients { g_a: [0.0; 3], g_b: [0.0; 3], h: [[0.0; 3]; 3] };
        for k in 0..3 {
            c.g_a[k] = e(k + 1, 0);
            c.g_b[k] = e(0, k + 1);
            for l in 0..3 {
                c.h[k][l] = e(k + 1, l + 1);
            }
        }
        c
    }

    /// Transpose on the second factor.
    pub fn partial_transpose(&self) -> Operator {
        let mut out = Operator::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        out[(2 * a + b2, 2 * a2 + b)] = self.rho[(2 * a + b, 2 * a2 + b2)];
                    }
                }
            }
        }
        out
    }
}

fn bloch_matrix(c: &PairCoefficients) -> Operator {
    let mut rho = pauli(0).kronecker(&pauli(0));
    for k in 0..3 {
        rho += pauli(k + 1).kronecker(&pauli(0)).scale(c.g_a[k]);
        rho += pauli(0).kronecker(&pauli(k + 1)).scale(c.g_b[k]);
        for l in 0..3 {
            rho += pauli(k + 1).kronecker(&pauli(l + 1)).scale(c.h[k][l]);
        }
    }
    rho.scale(0.25)
}

/// Normalized collective moments of two blocks of `n` spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectiveMoments {
    pub n: usize,
    pub s_a: [f64; 3],
    pub s_b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl CollectiveMoments {
    pub fn new(n: usize, s_a: [f64; 3], s_b: [f64; 3], t: [[f64; 3]; 3]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("empty sample".into()));
        }
        let ok = |x: f64| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&x);
        if !(s_a.iter().chain(&s_b).chain(t.iter().flatten()).all(|&x| ok(x))) {
            return Err(Error::Parameter("collective moments outside [-1, 1]".into()));
        }
        Ok(Self { n, s_a, s_b, t })
    }

    /// Moments of an explicit ensemble of `n^2` pair states `rho_(alpha, beta)`.
    pub fn from_pair_states(n: usize, states: &[PairState]) -> Result<Self> {
        if n == 0 || states.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: states.len() });
        }
        let mut m = CollectiveMoments { n, s_a: [0.0; 3], s_b: [0.0; 3], t: [[0.0; 3]; 3] };
        let w = 1.0 / states.len() as f64;
        for st in states {
            let c = st.coefficients();
            for k in 0..3 {
                m.s_a[k] += w * c.g_a[k];
                m.s_b[k] += w * c.g_b[k];
                for l in 0..3 {
                    m.t[k][l] += w * c.h[k][l];
                }
            }
        }
        Ok(m)
    }

    /// Moments of two spins of length `s = n/2` with joint density `rho`
    /// on `(2s+1)^2` levels, `S^A = J x 1`, `S^B = 1 x J`.
    pub fn from_spins(s: SpinLength, rho: &Operator) -> Result<Self> {
        let d = s.dim();
        if rho.nrows() != d * d {
            return Err(Error::Dimension { expected: d * d, got: rho.nrows() });
        }
        let n = s.twice() as usize;
        if n == 0 {
            return Err(Error::Parameter("spin 0 carries no qubits".into()));
        }
        let ops = build_spin_operators(s);
        let js = [&ops.jx, &ops.jy, &ops.jz];
        let id = Operator::identity(d, d);
        let ev = |op: &Operator| (rho * op).trace().re;
        let nf = n as f64;
        let mut m = CollectiveMoments { n, s_a: [0.0; 3], s_b: [0.0; 3], t: [[0.0; 3]; 3] };
        for k in 0..3 {
            m.s_a[k] = 2.0 / nf * ev(&js[k].kronecker(&id));
            m.s_b[k] = 2.0 / nf * ev(&id.kronecker(js[k]));
            for l in 0..3 {
                m.t[k][l] = 4.0 / (nf * nf) * ev(&js[k].kronecker(js[l]));
            }
        }
        Ok(m)
    }

    /// Moments of the blocks `a` and `b` (qubit indices, equal sizes) of a
    /// register state.
    pub fn from_register(rho: &Operator, n_qubits: usize, a: &[usize], b: &[usize]) -> Result<Self> {
        check_register(rho, n_qubits)?;
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Parameter(format!("blocks of sizes {} and {}", a.len(), b.len())));
        }
        if a.iter().chain(b).any(|&q| q >= n_qubits) || a.iter().any(|q| b.contains(q)) {
            return Err(Error::Parameter("blocks must be disjoint qubits of the register".into()));
        }
        let n = a.len();
        let nf = n as f64;
        let mut m = CollectiveMoments { n, s_a: [0.0; 3], s_b: [0.0; 3], t: [[0.0; 3]; 3] };
        for k in 0..3 {
            m.s_a[k] = a.iter().map(|&q| pauli_expectation(rho, n_qubits, &[(q, k + 1)]).re).sum::<f64>() / nf;
            m.s_b[k] = b.iter().map(|&q| pauli_expectation(rho, n_qubits, &[(q, k + 1)]).re).sum::<f64>() / nf;
            for l in 0..3 {
                let mut acc = 0.0;
                for &qa in a {
                    for &qb in b {
                        acc += pauli_expectation(rho, n_qubits, &[(qa, k + 1), (qb, l + 1)]).re;
                    }
                }
                m.t[k][l] = acc / (nf * nf);
            }
        }
        Ok(m)
    }
}

/// The virtual two-qubit state built from collective moments.
pub fn virtual_qubit_state(m: &CollectiveMoments) -> Result<PairState> {
    PairState::from_coefficients(&PairCoefficients { g_a: m.s_a, g_b: m.s_b, h: m.t })
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
pub fn negativity(state: &PairState) -> f64 {
    SymmetricEigen::new(state.partial_transpose()).eigenvalues.iter().map(|&l| (-l).max(0.0)).sum()
}

/// The only eigenvalue of the partial transpose of an xxz-form state that can
/// be negative: `(1/4)[1 - sqrt(c^2 + 4 h_xx^2) + sign t_zz]`, where
/// `h_xx = sign h_yy` and `c = g_z^a + sign g_z^b`.
pub fn xxz_eigenvalue(c: f64, hxx: f64, t_zz: f64, sign: f64) -> f64 {
    0.25 * (1.0 - (c * c + 4.0 * hxx * hxx).sqrt() + sign * t_zz)
}

/// Two-spin reduced state of the Dicke state `|N; k>`:
/// `d |00><00| + e |11><11| + 2f |psi+><psi+|` with `k` excitations `|1>`.
pub fn dicke_pair(n_total: usize, k: usize) -> Result<PairState> {
    if n_total < 2 || k > n_total {
        return Err(Error::Parameter(format!("Dicke state needs N >= 2 and 0 <= k <= N, got N = {n_total}, k = {k}")));
    }
    let (nf, kf) = (n_total as f64, k as f64);
    let norm = nf * (nf - 1.0);
    let d = (nf - kf) * (nf - kf - 1.0) / norm;
    let e = kf * (kf - 1.0) / norm;
    let f = kf * (nf - kf) / norm;
    let mut rho = Operator::zeros(4, 4);
    rho[(0, 0)] = C64::new(d, 0.0);
    rho[(3, 3)] = C64::new(e, 0.0);
    for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        rho[(r, c)] = C64::new(f, 0.0);
    }
    PairState::new(rho)
}

/// Virtual pair and `E_ab` for two blocks of `n` spins of `|N; k>`. Every pair
/// of distinct spins has the same reduced state, so the block moments are
/// the average over the `n^2` identical pairs.
pub fn dicke_collective(n_total: usize, k: usize, n: usize) -> Result<(PairState, f64)> {
    if n == 0 || 2 * n > n_total {
        return Err(Error::Parameter(format!("block size n = {n} outside 1..=N/2 for N = {n_total}")));
    }
    let pair = dicke_pair(n_total, k)?;
    let m = CollectiveMoments::from_pair_states(n, &vec![pair; n * n])?;
    let v = virtual_qubit_state(&m)?;
    let e = negativity(&v);
    Ok((v, e))
}

/// Moments of the singlet of two spins `s = n/2`: `t_ii = -(n+2)/(3n)`.
pub fn singlet_moments(n: usize) -> Result<CollectiveMoments> {
    admixture_moments(n, 1.0)
}

pub fn singlet_collective(n: usize) -> Result<f64> {
    Ok(negativity(&virtual_qubit_state(&singlet_moments(n)?)?))
}

/// Moments of `p |singlet><singlet| + (1-p)` times `n` pairs `(alpha, alpha)`
/// in `(|01><01| + |10><10|)/2`. The noise only adds `-1/n` to `t_zz`.
pub fn admixture_moments(n: usize, p: f64) -> Result<CollectiveMoments> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("mixing weight p = {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::Parameter("empty sample".into()));
    }
    let nf = n as f64;
    let ts = -(nf + 2.0) / (3.0 * nf);
    let mut t = [[0.0; 3]; 3];
    t[0][0] = p * ts;
    t[1][1] = p * ts;
    t[2][2] = p * ts - (1.0 - p) / nf;
    CollectiveMoments::new(n, [0.0; 3], [0.0; 3], t)
}

/// `E_ab` of the singlet with admixture and the critical block size
/// `n_c = ceil((1+p)/(1-p))` (`None` for `p = 1`, where it is infinite).
pub fn admixture_collective(n: usize, p: f64) -> Result<(f64, Option<usize>)> {
    let e = negativity(&virtual_qubit_state(&admixture_moments(n, p)?)?);
    Ok((e, critical_block_size(p)?))
}

pub fn critical_block_size(p: f64) -> Result<Option<usize>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("mixing weight p = {p} outside [0, 1]")));
    }
    if p == 1.0 {
        return Ok(None);
    }
    // ratios that are integers in exact arithmetic must not round up
    let ratio = (1.0 + p) / (1.0 - p);
    Ok(Some((ratio - 1e-9).ceil().max(1.0) as usize))
}

/// Correlation tensor `t_(i1..iM)` of `M` qubits, `i_p` in `0..4`,
/// flattened with `i_1` most significant. `t_(0..0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTensor {
    pub m: usize,
    pub values: Vec<f64>,
}

impl CorrelationTensor {
    pub fn zeros(m: usize) -> Self {
        let mut values = vec![0.0; 1 << (2 * m)];
        values[0] = 1.0;
        Self { m, values }
    }

    pub fn index(idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| 4 * acc + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[Self::index(idx)]
    }

    fn digits(&self, flat: usize) -> Vec<(usize, usize)> {
        (0..self.m).map(|q| (q, (flat >> (2 * (self.m - 1 - q))) & 3)).collect()
    }

    /// Tensor of an `M`-qubit state.
    pub fn of_state(rho: &Operator, m: usize) -> Result<Self> {
        check_register(rho, m)?;
        let mut t = Self::zeros(m);
        for flat in 0..t.values.len() {
            let ops = t.digits(flat);
            t.values[flat] = pauli_expectation(rho, m, &ops).re;
        }
        Ok(t)
    }

    /// Normalized collective tensor of `M` blocks of `n` qubits in a register:
    /// the average of the tensors of all `n^M` tuples.
    pub fn of_blocks(rho: &Operator, n_qubits: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        check_register(rho, n_qubits)?;
        let m = blocks.len();
        if m == 0 || m > MAX_VIRTUAL_QUBITS {
            return Err(Error::Parameter(format!("{m} blocks outside 1..={MAX_VIRTUAL_QUBITS}")));
        }
        let n = blocks[0].len();
        if n == 0 || blocks.iter().any(|b| b.len() != n || b.iter().any(|&q| q >= n_qubits)) {
            return Err(Error::Parameter("blocks must be nonempty, of equal size and inside the register".into()));
        }
        let mut t = Self::zeros(m);
        let tuples = n.pow(m as u32);
        for flat in 1..t.values.len() {
            let digits = t.digits(flat);
            let mut acc = 0.0;
            for tup in 0..tuples {
                let mut rest = tup;
                let mut ops = Vec::with_capacity(m);
                for (p, &(_, i)) in digits.iter().enumerate() {
                    let q = blocks[p][rest % n];
                    rest /= n;
                    if i > 0 {
                        ops.push((q, i));
                    }
                }
                acc += pauli_expectation(rho, n_qubits, &ops).re;
            }
            t.values[flat] = acc / tuples as f64;
        }
        Ok(t)
    }
}

/// `rho = 2^-M sum t_(i1..iM) sigma_i1 x ... x sigma_iM`.
pub fn multipartite_virtual(t: &CorrelationTensor) -> Result<Operator> {
    if t.m == 0 || t.m > MAX_VIRTUAL_QUBITS {
        return Err(Error::Parameter(format!("{} virtual qubits outside 1..={MAX_VIRTUAL_QUBITS}", t.m)));
    }
    if t.values.len() != 1 << (2 * t.m) {
        return Err(Error::Dimension { expected: 1 << (2 * t.m), got: t.values.len() });
    }
    let d = 1 << t.m;
    let mut rho = Operator::zeros(d, d);
    for (flat, &c) in t.values.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let ops = t.digits(flat);
        for x in 0..d {
            let (flip, phase) = pauli_action(&ops, t.m, x);
            rho[(x ^ flip, x)] += phase * c;
        }
    }
    rho /= C64::new(d as f64, 0.0);
    check_density(&rho, "virtual state")?;
    Ok(rho)
}

/// Collective negativity against the average pair negativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityCheck {
    pub e_ab: f64,
    pub average_e: f64,
    pub gap: f64,
}

/// Compares `E(sum rho / n^2)` with `sum E(rho) / n^2` for an explicit
/// ensemble of `n^2` pair states.
pub fn convexity_check(states: &[PairState]) -> Result<ConvexityCheck> {
    let n = (states.len() as f64).sqrt().round() as usize;
    let m = CollectiveMoments::from_pair_states(n, states)?;
    let e_ab = negativity(&virtual_qubit_state(&m)?);
    let average_e = states.iter().map(negativity).sum::<f64>() / states.len() as f64;
    Ok(ConvexityCheck { e_ab, average_e, gap: average_e - e_ab })
}
