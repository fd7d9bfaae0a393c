//! Boolean functions encoded by Pauli operations, and decidability as GF(2)
//! membership in the span of an axiom set.
//!
//! A site with bits `(m, n)` carries `i^{mn} sigma_x^m sigma_z^n`, so `(1,0)`,
//! `(0,1)` and `(1,1)` are `X`, `Z` and `Y`. The string with bit vectors
//! `(m, n)` asks the proposition `sum_j [n_j f_j(0) + m_j f_j(1)] = 0`; a state
//! with eigenvalue `(-1)^b` under the string encodes that the sum equals `b`.
//!
//! Qubit 0 is the most significant bit of a basis index, `sigma_z |0> = |0>`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{Ket, Operator};
use crate::C64;

/// Largest register for dense statevector routines.
pub const MAX_QUBITS: usize = 12;
/// Largest register for exhaustive enumeration of all `4^N` strings.
pub const MAX_AUDIT_QUBITS: usize = 6;
/// Largest register for the GF(2) bookkeeping (two bits per site in a `u64`).
pub const MAX_SYMPLECTIC_QUBITS: usize = 32;

const DETERMINISTIC_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// A function `{0,1} -> {0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BooleanFn {
    pub f0: bool,
    pub f1: bool,
}

impl BooleanFn {
    pub fn new(f0: bool, f1: bool) -> Self {
        Self { f0, f1 }
    }

    /// `y_k` with `k = 2 f(0) + f(1)`.
    pub fn y(k: usize) -> Self {
        assert!(k < 4, "there are four Boolean functions, got y_{k}");
        Self { f0: k & 2 != 0, f1: k & 1 != 0 }
    }

    pub fn all() -> [Self; 4] {
        [Self::y(0), Self::y(1), Self::y(2), Self::y(3)]
    }

    pub fn index(&self) -> usize {
        2 * self.f0 as usize + self.f1 as usize
    }
}

/// Power of `i` collected by a product of strings.
fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Tensor product of `i^{m_j n_j} sigma_x^{m_j} sigma_z^{n_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    m: Vec<bool>,
    n: Vec<bool>,
}

impl PauliString {
    pub fn new(m: Vec<bool>, n: Vec<bool>) -> Result<Self> {
        if m.len() != n.len() {
            return Err(Error::Dimension { expected: m.len(), got: n.len() });
        }
        if m.is_empty() {
            return Err(Error::Parameter("Pauli string on zero qubits".into()));
        }
        Ok(Self { m, n })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { m: vec![false; n_qubits], n: vec![false; n_qubits] }
    }

    /// Parses letters `I`, `X`, `Y`, `Z`, qubit 0 first.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut m = Vec::new();
        let mut n = Vec::new();
        for c in label.chars() {
            let (a, b) = match c.to_ascii_uppercase() {
                'I' => (false, false),
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => return Err(Error::Parameter(format!("bad Pauli letter {c:?} in {label:?}"))),
            };
            m.push(a);
            n.push(b);
        }
        Self::new(m, n)
    }

    /// String number `index` in base 4, site digits `0..4 = I, X, Z, Y` with qubit 0 most significant.
    pub fn from_index(n_qubits: usize, index: u64) -> Self {
        let mut m = vec![false; n_qubits];
        let mut n = vec![false; n_qubits];
        for j in 0..n_qubits {
            let d = (index >> (2 * (n_qubits - 1 - j))) & 3;
            m[j] = d & 1 != 0;
            n[j] = d & 2 != 0;
        }
        Self { m, n }
    }

    pub fn label(&self) -> String {
        self.m
            .iter()
            .zip(&self.n)
            .map(|(&a, &b)| match (a, b) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[bool] {
        &self.m
    }

    pub fn n(&self) -> &[bool] {
        &self.n
    }

    pub fn is_identity(&self) -> bool {
        !self.m.iter().chain(&self.n).any(|&b| b)
    }

    fn mask(bits: &[bool]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// Row `(m | n)` packed into a `u64`, `m` in the high half.
    fn symplectic_row(&self) -> u64 {
        let n_q = self.n_qubits();
        ((Self::mask(&self.m) as u64) << n_q) | Self::mask(&self.n) as u64
    }

    fn y_count(&self) -> u32 {
        self.m.iter().zip(&self.n).filter(|(&a, &b)| a && b).count() as u32
    }

    /// Symplectic product `sum_j m_j n'_j + n_j m'_j` mod 2 is zero.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let s = self.m.iter().zip(&other.n).chain(self.n.iter().zip(&other.m)).filter(|(&a, &b)| a && b).count();
        s % 2 == 0
    }

    /// `self * other = phase * (result)`.
    pub fn mul(&self, other: &Self) -> Result<(C64, Self)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::Dimension { expected: self.n_qubits(), got: other.n_qubits() });
        }
        // i^{m1 n1} X^{m1} Z^{n1} i^{m2 n2} X^{m2} Z^{n2} = i^{m1 n1 + m2 n2} (-1)^{n1 m2} X^{m1+m2} Z^{n1+n2}
        let mut pow = 0u32;
        let mut m = Vec::with_capacity(self.n_qubits());
        let mut n = Vec::with_capacity(self.n_qubits());
        for j in 0..self.n_qubits() {
            let (m1, n1, m2, n2) = (self.m[j] as u32, self.n[j] as u32, other.m[j] as u32, other.n[j] as u32);
            let (m3, n3) = (m1 ^ m2, n1 ^ n2);
            pow += m1 * n1 + m2 * n2 + 2 * n1 * m2 + 4 - m3 * n3;
            m.push(m3 == 1);
            n.push(n3 == 1);
        }
        Ok((i_pow(pow), Self { m, n }))
    }

    /// `P|x> = phase |x ^ flip>`.
    fn action(&self, x: usize) -> (usize, C64) {
        let parity = (Self::mask(&self.n) & x).count_ones();
        (Self::mask(&self.m), i_pow(self.y_count() + 2 * parity))
    }

    pub fn apply(&self, psi: &Ket) -> Result<Ket> {
        let d = self.dim()?;
        if psi.len() != d {
            return Err(Error::Dimension { expected: d, got: psi.len() });
        }
        let mut out = Ket::zeros(d);
        for x in 0..d {
            let (flip, phase) = self.action(x);
            out[x ^ flip] = phase * psi[x];
        }
        Ok(out)
    }

    pub fn matrix(&self) -> Result<Operator> {
        let d = self.dim()?;
        let mut op = Operator::zeros(d, d);
        for x in 0..d {
            let (flip, phase) = self.action(x);
            op[(x ^ flip, x)] = phase;
        }
        Ok(op)
    }

    /// `<psi|P|psi>`, real for Hermitian `P`.
    pub fn expectation(&self, psi: &Ket) -> Result<f64> {
        Ok(psi.dotc(&self.apply(psi)?).re)
    }

    fn dim(&self) -> Result<usize> {
        if self.n_qubits() > MAX_QUBITS {
            return Err(Error::Parameter(format!("{} qubits exceed the dense limit {MAX_QUBITS}", self.n_qubits())));
        }
        Ok(1 << self.n_qubits())
    }

    /// Value of `sum_j [n_j f_j(0) + m_j f_j(1)]` mod 2.
    pub fn evaluate(&self, fns: &[BooleanFn]) -> Result<bool> {
        if fns.len() != self.n_qubits() {
            return Err(Error::Dimension { expected: self.n_qubits(), got: fns.len() });
        }
        Ok(fns.iter().enumerate().fold(false, |acc, (j, f)| acc ^ (self.n[j] && f.f0) ^ (self.m[j] && f.f1)))
    }

    /// The proposition `sum = bit` written out, e.g. `f1(1)+f2(1)+f3(1) = 1`.
    pub fn proposition(&self, bit: bool) -> String {
        let mut terms = Vec::new();
        for j in 0..self.n_qubits() {
            if self.n[j] {
                terms.push(format!("f{}(0)", j + 1));
            }
            if self.m[j] {
                terms.push(format!("f{}(1)", j + 1));
            }
        }
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join("+") };
        format!("{lhs} = {}", bit as u8)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Eigenvalue `(-1)^bit`.
pub fn eigenvalue(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Bit `b` with `(-1)^b = value`.
pub fn truth_bit(value: f64) -> bool {
    value < 0.0
}

/// Reduces `rows` to echelon form, keeping the combination of original rows behind each.
struct Gf2Basis {
    rows: Vec<(u64, u64)>,
}

impl Gf2Basis {
    /// `None` if the rows are dependent.
    fn new(rows: &[u64]) -> Option<Self> {
        let mut basis = Self { rows: Vec::new() };
        for (p, &r) in rows.iter().enumerate() {
            let (rest, combo) = basis.reduce(r, 1 << p);
            if rest == 0 {
                return None;
            }
            basis.rows.push((rest, combo));
        }
        Some(basis)
    }

    fn reduce(&self, mut r: u64, mut combo: u64) -> (u64, u64) {
        for &(b, c) in &self.rows {
            let pivot = 63 - b.leading_zeros();
            if r >> pivot & 1 == 1 {
                r ^= b;
                combo ^= c;
            }
        }
        (r, combo)
    }
}

/// `N` independent, pairwise commuting strings with the truth bits they encode.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomSet {
    rows: Vec<PauliString>,
    bits: Vec<bool>,
    #[serde(skip)]
    basis: Vec<(u64, u64)>,
}

impl AxiomSet {
    pub fn new(rows: Vec<PauliString>, bits: Vec<bool>) -> Result<Self> {
        let n_q = rows.first().map(|r| r.n_qubits()).ok_or_else(|| Error::Parameter("empty axiom set".into()))?;
        if n_q > MAX_SYMPLECTIC_QUBITS {
            return Err(Error::Parameter(format!("{n_q} qubits exceed {MAX_SYMPLECTIC_QUBITS}")));
        }
        if rows.len() != n_q {
            return Err(Error::Parameter(format!("{} axioms for {n_q} qubits", rows.len())));
        }
        if bits.len() != rows.len() {
            return Err(Error::Dimension { expected: rows.len(), got: bits.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.n_qubits() != n_q) {
            return Err(Error::Dimension { expected: n_q, got: r.n_qubits() });
        }
        for (a, ra) in rows.iter().enumerate() {
            for rb in &rows[a + 1..] {
                if !ra.commutes_with(rb) {
                    return Err(Error::Parameter(format!("axioms {ra} and {rb} do not commute")));
                }
            }
        }
        let packed: Vec<u64> = rows.iter().map(|r| r.symplectic_row()).collect();
        let basis = Gf2Basis::new(&packed).ok_or_else(|| Error::Parameter("axiom rows are dependent over GF(2)".into()))?;
        Ok(Self { rows, bits, basis: basis.rows })
    }

    pub fn from_labels(labels: &[&str], bits: &[bool]) -> Result<Self> {
        let rows = labels.iter().map(|l| PauliString::from_label(l)).collect::<Result<Vec<_>>>()?;
        Self::new(rows, bits.to_vec())
    }

    /// Random maximal commuting set, grown greedily by rejection sampling.
    pub fn random<R: Rng>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_SYMPLECTIC_QUBITS {
            return Err(Error::Parameter(format!("{n_qubits} qubits outside 1..={MAX_SYMPLECTIC_QUBITS}")));
        }
        let mut rows: Vec<PauliString> = Vec::new();
        let mut basis = Gf2Basis { rows: Vec::new() };
        while rows.len() < n_qubits {
            let m: Vec<bool> = (0..n_qubits).map(|_| rng.gen()).collect();
            let n: Vec<bool> = (0..n_qubits).map(|_| rng.gen()).collect();
            let cand = PauliString { m, n };
            if !rows.iter().all(|r| r.commutes_with(&cand)) {
                continue;
            }
            let (rest, combo) = basis.reduce(cand.symplectic_row(), 1 << rows.len());
            if rest == 0 {
                continue;
            }
            basis.rows.push((rest, combo));
            rows.push(cand);
        }
        let bits = (0..n_qubits).map(|_| rng.gen()).collect();
        Self::new(rows, bits)
    }

    pub fn n_qubits(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Axioms obeyed by the black box output: bits `sum_j [n_j f_j(0) + m_j f_j(1)]`.
    pub fn encoded_by(rows: Vec<PauliString>, fns: &[BooleanFn]) -> Result<Self> {
        let bits = rows.iter().map(|r| r.evaluate(fns)).collect::<Result<Vec<_>>>()?;
        Self::new(rows, bits)
    }

    /// The state with `Omega_p = (-1)^{b_p}` for every axiom, from projector products on a basis vector.
    pub fn joint_eigenstate(&self) -> Result<Ket> {
        let d = self.rows[0].dim()?;
        let floor = 0.5 / d as f64;
        for x in 0..d {
            let mut psi = Ket::zeros(d);
            psi[x] = C64::new(1.0, 0.0);
            for (r, &b) in self.rows.iter().zip(&self.bits) {
                let p = r.apply(&psi)?;
                psi = (&psi + p * C64::new(eigenvalue(b), 0.0)) * C64::new(0.5, 0.0);
            }
            let norm2 = psi.norm_squared();
            if norm2 > floor {
                return Ok(psi / C64::new(norm2.sqrt(), 0.0));
            }
        }
        Err(Error::Convergence("no basis vector overlaps the joint eigenspace".into()))
    }
}

/// `sigma_x^{f(0)} sigma_z^{f(1)}` on every site.
pub fn blackbox_unitary(fns: &[BooleanFn]) -> Result<Operator> {
    let n_q = fns.len();
    if n_q == 0 || n_q > MAX_QUBITS {
        return Err(Error::Parameter(format!("black box on {n_q} qubits outside 1..={MAX_QUBITS}")));
    }
    let d = 1usize << n_q;
    let flip = fns.iter().fold(0, |acc, f| (acc << 1) | f.f0 as usize);
    let phase = fns.iter().fold(0, |acc, f| (acc << 1) | f.f1 as usize);
    let mut u = Operator::zeros(d, d);
    for x in 0..d {
        let s = if (phase & x).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        u[(x ^ flip, x)] = C64::new(s, 0.0);
    }
    Ok(u)
}

/// `U|psi>` without building the matrix.
pub fn apply_blackbox(fns: &[BooleanFn], psi: &Ket) -> Result<Ket> {
    let n_q = fns.len();
    if n_q == 0 || n_q > MAX_QUBITS {
        return Err(Error::Parameter(format!("black box on {n_q} qubits outside 1..={MAX_QUBITS}")));
    }
    let d = 1usize << n_q;
    if psi.len() != d {
        return Err(Error::Dimension { expected: d, got: psi.len() });
    }
    let flip = fns.iter().fold(0, |acc, f| (acc << 1) | f.f0 as usize);
    let phase = fns.iter().fold(0, |acc, f| (acc << 1) | f.f1 as usize);
    let mut out = Ket::zeros(d);
    for x in 0..d {
        let s = if (phase & x).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[x ^ flip] = psi[x] * s;
    }
    Ok(out)
}

/// Outcome statistics of a projective Pauli measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub basis: PauliString,
    /// Probability of eigenvalue `+1` (truth bit 0).
    pub p_plus: f64,
    pub p_minus: f64,
    pub shots: u64,
    pub seed: u64,
    /// Counts of `+1` and `-1`.
    pub counts: [u64; 2],
    pub deterministic: bool,
    /// The eigenvalue when deterministic.
    pub outcome: Option<i8>,
}

impl Measurement {
    pub fn uniform(&self) -> bool {
        (self.p_plus - 0.5).abs() < DETERMINISTIC_TOL
    }

    pub fn frequency_plus(&self) -> f64 {
        if self.shots == 0 {
            f64::NAN
        } else {
            self.counts[0] as f64 / self.shots as f64
        }
    }
}

fn exact_probabilities(psi: &Ket, p: &PauliString) -> Result<(f64, f64)> {
    let ppsi = p.apply(psi)?;
    let plus = ((psi + &ppsi) * C64::new(0.5, 0.0)).norm_squared();
    let minus = ((psi - &ppsi) * C64::new(0.5, 0.0)).norm_squared();
    Ok((plus, minus))
}

fn sample(p_plus: f64, shots: u64, rng: &mut ChaCha8Rng) -> [u64; 2] {
    let plus = (0..shots).filter(|_| rng.gen::<f64>() < p_plus).count() as u64;
    [plus, shots - plus]
}

fn measure_with(psi: &Ket, p: &PauliString, shots: u64, seed: u64, stream: u64) -> Result<Measurement> {
    let (p_plus, p_minus) = exact_probabilities(psi, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let counts = sample(p_plus, shots, &mut rng);
    let deterministic = p_plus.max(p_minus) > 1.0 - DETERMINISTIC_TOL;
    let outcome = deterministic.then(|| if p_plus > p_minus { 1 } else { -1 });
    Ok(Measurement { basis: p.clone(), p_plus, p_minus, shots, seed, counts, deterministic, outcome })
}

fn check_state(psi: &Ket) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Measures `P` on `psi`: exact probabilities from `(1 +- P)/2`, then `shots` seeded samples.
pub fn measure_pauli(psi: &Ket, p: &PauliString, shots: u64, seed: u64) -> Result<Measurement> {
    check_state(psi)?;
    measure_with(psi, p, shots, seed, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Decidability {
    /// `Theta = sign * prod_p Omega_p^{k_p}` and the derived truth bit is `sum_p k_p b_p`.
    Decidable { k: Vec<bool>, truth: bool, sign: i8 },
    Undecidable,
}

impl Decidability {
    pub fn is_decidable(&self) -> bool {
        matches!(self, Self::Decidable { .. })
    }
}

/// GF(2) solve of the `(m | n)` row of `theta` against the axiom rows.
pub fn decidability_test(axioms: &AxiomSet, theta: &PauliString) -> Result<Decidability> {
    if theta.n_qubits() != axioms.n_qubits() {
        return Err(Error::Dimension { expected: axioms.n_qubits(), got: theta.n_qubits() });
    }
    let basis = Gf2Basis { rows: axioms.basis.clone() };
    let (rest, combo) = basis.reduce(theta.symplectic_row(), 0);
    if rest != 0 {
        return Ok(Decidability::Undecidable);
    }
    let k: Vec<bool> = (0..axioms.n_qubits()).map(|p| combo >> p & 1 == 1).collect();
    let truth = k.iter().zip(&axioms.bits).fold(false, |acc, (&kp, &b)| acc ^ (kp && b));
    let mut prod = (C64::new(1.0, 0.0), PauliString::identity(axioms.n_qubits()));
    for (r, _) in axioms.rows.iter().zip(&k).filter(|(_, &kp)| kp) {
        let (ph, s) = prod.1.mul(r)?;
        prod = (prod.0 * ph, s);
    }
    debug_assert_eq!(prod.1, *theta);
    let sign = if prod.0.re > 0.0 { 1 } else { -1 };
    Ok(Decidability::Decidable { k, truth, sign })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub theta: PauliString,
    pub decidability: Decidability,
    pub measurement: Measurement,
    pub commutes: bool,
    pub uniform: bool,
    /// Decidable with a deterministic outcome, or undecidable with a uniform one.
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub n_qubits: usize,
    pub axioms: AxiomSet,
    pub seed: u64,
    pub shots: u64,
    pub entries: Vec<AuditEntry>,
    pub decidable: usize,
    pub deterministic: usize,
    pub uniform: usize,
    pub all_consistent: bool,
}

/// Measures every string on the joint eigenstate of `axioms`; entry `t` samples on stream `t` of `seed`.
pub fn decidable_randomness_audit(axioms: &AxiomSet, shots: u64, seed: u64) -> Result<Audit> {
    let n_q = axioms.n_qubits();
    if n_q > MAX_AUDIT_QUBITS {
        return Err(Error::Parameter(format!("audit of {n_q} qubits exceeds {MAX_AUDIT_QUBITS}")));
    }
    let psi = axioms.joint_eigenstate()?;
    let entries = (0..1u64 << (2 * n_q))
        .into_par_iter()
        .map(|t| {
            let theta = PauliString::from_index(n_q, t);
            let decidability = decidability_test(axioms, &theta)?;
            let measurement = measure_with(&psi, &theta, shots, seed, t)?;
            let commutes = axioms.rows.iter().all(|r| r.commutes_with(&theta));
            let uniform = measurement.uniform();
            let consistent = if decidability.is_decidable() { measurement.deterministic } else { uniform };
            Ok(AuditEntry { theta, decidability, measurement, commutes, uniform, consistent })
        })
        .collect::<Result<Vec<_>>>()?;
    let decidable = entries.iter().filter(|e| e.decidability.is_decidable()).count();
    let deterministic = entries.iter().filter(|e| e.measurement.deterministic).count();
    let uniform = entries.iter().filter(|e| e.uniform).count();
    let all_consistent = entries.iter().all(|e| e.consistent);
    Ok(Audit { n_qubits: n_q, axioms: axioms.clone(), seed, shots, entries, decidable, deterministic, uniform, all_consistent })
}

/// Logical derivation against the quantum value for the three-qubit GHZ state.
#[derive(Debug, Clone, Serialize)]
pub struct GhzReport {
    pub axioms: Vec<PauliString>,
    pub axiom_propositions: Vec<String>,
    /// `<GHZ|Omega_p|GHZ>`.
    pub axiom_values: Vec<f64>,
    pub axiom_bits: Vec<bool>,
    pub target: PauliString,
    pub k: Vec<bool>,
    /// XOR of the axiom bits selected by `k`.
    pub logical_bit: bool,
    pub logical_proposition: String,
    /// `Omega_1 Omega_2 Omega_3 = product_sign * target`.
    pub product_sign: i8,
    pub quantum_value: f64,
    pub quantum_bit: bool,
    pub quantum_proposition: String,
    pub contradiction: bool,
}

pub fn ghz_state() -> Ket {
    let mut psi = Ket::zeros(8);
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[0] = a;
    psi[7] = a;
    psi
}

pub fn ghz_contradiction() -> Result<GhzReport> {
    let psi = ghz_state();
    let rows = ["YYX", "YXY", "XYY"].iter().map(|l| PauliString::from_label(l)).collect::<Result<Vec<_>>>()?;
    let axiom_values = rows.iter().map(|r| r.expectation(&psi)).collect::<Result<Vec<_>>>()?;
    let axiom_bits: Vec<bool> = axiom_values.iter().map(|&v| truth_bit(v)).collect();
    let axioms = AxiomSet::new(rows.clone(), axiom_bits.clone())?;
    let target = PauliString::from_label("XXX")?;
    let Decidability::Decidable { k, truth, sign } = decidability_test(&axioms, &target)? else {
        return Err(Error::Parameter("XXX is not in the span of the GHZ axioms".into()));
    };
    let quantum_value = target.expectation(&psi)?;
    let quantum_bit = truth_bit(quantum_value);
    Ok(GhzReport {
        axiom_propositions: rows.iter().zip(&axiom_bits).map(|(r, &b)| r.proposition(b)).collect(),
        axioms: rows,
        axiom_values,
        axiom_bits,
        logical_proposition: target.proposition(truth),
        quantum_proposition: target.proposition(quantum_bit),
        target,
        k,
        logical_bit: truth,
        product_sign: sign,
        quantum_value,
        quantum_bit,
        contradiction: truth != quantum_bit,
    })
}
