//! Coarse-grained `J_z` measurements.
//!
//! A partition bunches neighbouring eigenvalues `m` into slots. Each slot owns
//! a polar band on the sphere with edges at `cos theta = c / (j + 1/2)`, where
//! `c` is the half-integer cut between two slots, so the band areas match the
//! slot sizes. Slots are numbered from the north pole downwards.
//!
//! Two measurement models are built on a partition: the sharp von Neumann
//! projector onto the slot, and the coherent-state POVM obtained by integrating
//! `|Omega><Omega|` over the band. The POVM is diagonal in the `J_z` basis with
//! coefficients given by differences of regularized incomplete beta functions.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lg::parity_correlation_with;
use crate::special::{beta_reg, gauss_legendre};
use crate::spin::{
    bhattacharyya_overlap, coherent_ket, coherent_overlaps_on_grid, q_on_grid, Direction, Evolution, Ket, Operator,
    SphereGrid, SpinLength, SpinState, StateRepr,
};
use crate::C64;

/// Normalization slack accepted when comparing densities on a grid.
const NORM_TOL: f64 = 1e-6;
/// Largest change of a Bhattacharyya overlap under one grid doubling.
const REFINE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PartitionMode {
    /// Slots of width `delta_m` starting at `m = +j`; the last slot takes the
    /// remainder.
    Aligned,
    /// Two slots split at the equator. For integer `j` the state `m = 0`
    /// belongs to the southern slot.
    Hemispheres,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlotPartition {
    pub j: SpinLength,
    pub mode: PartitionMode,
    pub delta_m: f64,
    /// Cut points in increasing order, from `-j-1/2` to `j+1/2`.
    pub boundaries: Vec<f64>,
    /// Basis indices of each slot, north first.
    pub slots: Vec<Vec<usize>>,
    /// Polar interval `(theta1, theta2)` of each slot, north first.
    pub bands: Vec<(f64, f64)>,
}

impl SlotPartition {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The slot holding basis index `i`.
    pub fn slot_of(&self, i: usize) -> usize {
        self.slots.iter().position(|s| s.contains(&i)).expect("partition covers every index")
    }

    /// `delta_m >= 2 sqrt(j)`, the working meaning of "much coarser than the
    /// coherent-state width".
    pub fn is_coarse(&self) -> bool {
        self.delta_m >= 2.0 * self.j.j().sqrt()
    }

    /// Upper and lower cut of a slot, as `m` values.
    pub fn cuts(&self, slot: usize) -> (f64, f64) {
        let n = self.boundaries.len() - 1;
        (self.boundaries[n - slot], self.boundaries[n - slot - 1])
    }
}

fn band_theta(j: SpinLength, cut: f64) -> f64 {
    (cut / (j.j() + 0.5)).clamp(-1.0, 1.0).acos()
}

pub fn make_partition(j: SpinLength, delta_m: f64, mode: PartitionMode) -> Result<SlotPartition> {
    let d = j.dim() as f64;
    if !(delta_m.is_finite() && (1.0..=d).contains(&delta_m)) {
        return Err(Error::Partition(format!("delta_m = {delta_m} outside [1, {d}]")));
    }
    let top = j.j() + 0.5;
    let cuts_desc = match mode {
        PartitionMode::Hemispheres => vec![top, 0.0, -top],
        PartitionMode::Aligned => {
            let n = (d / delta_m - 1e-12).ceil().max(1.0) as usize;
            let mut c: Vec<f64> = (0..=n).map(|k| top - k as f64 * delta_m).collect();
            c[n] = -top;
            c
        }
    };
    let nslots = cuts_desc.len() - 1;
    let mut slots = vec![Vec::new(); nslots];
    for i in 0..j.dim() {
        let m = j.m(i);
        let s = (0..nslots).find(|&s| cuts_desc[s + 1] < m && m <= cuts_desc[s]).expect("cuts span the spectrum");
        slots[s].push(i);
    }
    let bands = (0..nslots).map(|s| (band_theta(j, cuts_desc[s]), band_theta(j, cuts_desc[s + 1]))).collect();
    let delta_m = match mode {
        PartitionMode::Hemispheres => top,
        PartitionMode::Aligned => delta_m,
    };
    let mut boundaries = cuts_desc;
    boundaries.reverse();
    Ok(SlotPartition { j, mode, delta_m, boundaries, slots, bands })
}

/// Sharp projector `sum_{m in slot} |m><m|`.
pub fn vn_slot_projector(part: &SlotPartition, slot: usize) -> Result<Operator> {
    let idx = part.slots.get(slot).ok_or_else(|| Error::Partition(format!("no slot {slot}")))?;
    let d = part.j.dim();
    let mut p = Operator::zeros(d, d);
    for &i in idx {
        p[(i, i)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// `I_u(j+m+1, j-m+1)` and its complement, each computed directly so that
/// small values keep their relative accuracy.
fn beta_pair(j: f64, m: f64, u: f64) -> (f64, f64) {
    let (a, b) = (j + m + 1.0, j - m + 1.0);
    (beta_reg(a, b, u), beta_reg(b, a, 1.0 - u))
}

/// `g(m) = (2j+1)/(4 pi) int_band |<m|Omega>|^2 d^2 Omega
///       = I_{u1}(j+m+1, j-m+1) - I_{u2}(j+m+1, j-m+1)`, `u = cos^2(theta/2)`.
pub fn povm_coefficient(j: SpinLength, band: (f64, f64), m: f64) -> f64 {
    let u1 = (band.0 / 2.0).cos().powi(2);
    let u2 = (band.1 / 2.0).cos().powi(2);
    let (i1, c1) = beta_pair(j.j(), m, u1);
    let (i2, c2) = beta_pair(j.j(), m, u2);
    let g = if i1 + i2 > 1.0 { c2 - c1 } else { i1 - i2 };
    g.clamp(0.0, 1.0)
}

/// Coherent-state POVM of a partition together with its Hermitian Kraus
/// operators `M = sqrt(P)`. Both are diagonal and stored as their diagonals.
#[derive(Debug, Clone)]
pub struct CoarsePOVM {
    pub j: SpinLength,
    pub elements: Vec<DVector<f64>>,
    pub kraus: Vec<DVector<f64>>,
}

impl CoarsePOVM {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, slot: usize) -> Operator {
        diag_op(&self.elements[slot])
    }

    pub fn kraus_operator(&self, slot: usize) -> Operator {
        diag_op(&self.kraus[slot])
    }

    /// `max |sum_s P_s - 1|`.
    pub fn completeness_error(&self) -> f64 {
        (0..self.j.dim())
            .map(|i| (self.elements.iter().map(|e| e[i]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |M_s^2 - P_s|`.
    pub fn kraus_error(&self) -> f64 {
        self.elements
            .iter()
            .zip(&self.kraus)
            .flat_map(|(e, k)| e.iter().zip(k.iter()).map(|(p, m)| (m * m - p).abs()))
            .fold(0.0, f64::max)
    }
}

fn diag_op(v: &DVector<f64>) -> Operator {
    Operator::from_diagonal(&v.map(|x| C64::new(x, 0.0)))
}

pub fn build_povm(part: &SlotPartition) -> CoarsePOVM {
    let j = part.j;
    let elements: Vec<DVector<f64>> = part
        .bands
        .iter()
        .map(|&band| DVector::from_iterator(j.dim(), (0..j.dim()).map(|i| povm_coefficient(j, band, j.m(i)))))
        .collect();
    let kraus = elements.iter().map(|e| e.map(f64::sqrt)).collect();
    CoarsePOVM { j, elements, kraus }
}

fn scale_ket(diag: &DVector<f64>, psi: &Ket) -> Ket {
    Ket::from_iterator(psi.len(), psi.iter().zip(diag.iter()).map(|(z, s)| z * *s))
}

fn check_dim(state: &SpinState, povm: &CoarsePOVM) -> Result<()> {
    if state.j != povm.j {
        return Err(Error::Dimension { expected: povm.j.dim(), got: state.j.dim() });
    }
    Ok(())
}

/// `w_s = Tr[rho P_s]`.
pub fn slot_probabilities(state: &SpinState, povm: &CoarsePOVM) -> Result<Vec<f64>> {
    check_dim(state, povm)?;
    let pop: Vec<f64> = match &state.repr {
        StateRepr::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
        StateRepr::Mixed(r) => (0..r.nrows()).map(|i| r[(i, i)].re).collect(),
    };
    Ok(povm.elements.iter().map(|e| e.iter().zip(&pop).map(|(g, p)| g * p).sum()).collect())
}

/// Product grid restricted to one polar band, exact for `Q` of spin `j`.
pub fn band_grid(j: SpinLength, band: (f64, f64)) -> SphereGrid {
    let (x, w) = gauss_legendre(j.twice() as usize + 2);
    let (hi, lo) = (band.0.cos(), band.1.cos());
    let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
    SphereGrid {
        cos_theta: x.iter().map(|t| mid + half * t).collect(),
        w_theta: w.iter().map(|v| v * half).collect(),
        n_phi: 2 * j.twice() as usize + 4,
    }
}

/// `w_s = int_{band s} Q(Omega) d^2 Omega`, evaluated by quadrature of `Q`.
pub fn slot_probabilities_from_q(state: &SpinState, part: &SlotPartition) -> Vec<f64> {
    part.bands
        .iter()
        .map(|&band| {
            let g = band_grid(state.j, band);
            g.integrate(&q_on_grid(state, &g))
        })
        .collect()
}

/// Post-measurement state `M rho M / w` for outcome `slot`.
pub fn reduce_state(state: &SpinState, povm: &CoarsePOVM, slot: usize) -> Result<SpinState> {
    check_dim(state, povm)?;
    let k = povm.kraus.get(slot).ok_or_else(|| Error::Partition(format!("no slot {slot}")))?;
    let w = slot_probabilities(state, povm)?[slot];
    if w <= 1e-14 {
        return Err(Error::Parameter(format!("outcome {slot} has probability {w:e}")));
    }
    match &state.repr {
        StateRepr::Pure(v) => SpinState::pure_normalized(state.j, scale_ket(k, v)),
        StateRepr::Mixed(r) => {
            let d = r.nrows();
            let rho = Operator::from_fn(d, d, |a, b| r[(a, b)] * (k[a] * k[b] / w));
            let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
            let tr = rho.trace().re;
            SpinState::mixed(state.j, rho.unscale(tr))
        }
    }
}

/// `sum_s w_s Q_s = (2j+1)/(4 pi) sum_s <Omega| U M_s rho M_s U^dag |Omega>` on
/// a grid, with `U = 1` when `u` is `None`.
pub fn branch_mixture_q(state: &SpinState, povm: &CoarsePOVM, u: Option<&Operator>, grid: &SphereGrid) -> Vec<f64> {
    let j = state.j;
    let pref = j.dim() as f64 / (4.0 * PI);
    let mut q = vec![0.0; grid.len()];
    for (w, psi) in state.ensemble() {
        for k in &povm.kraus {
            let mut b = scale_ket(k, &psi);
            if b.norm_squared() < 1e-30 {
                continue;
            }
            if let Some(u) = u {
                b = u * b;
            }
            let o = coherent_overlaps_on_grid(j, &b, grid);
            q.iter_mut().zip(o).for_each(|(qi, oi)| *qi += pref * w * oi);
        }
    }
    q
}

/// Bhattacharyya overlap computed on the base grid and on the doubled grid.
/// Fails if the two disagree by more than `1e-4`; returns the refined value.
fn resolved_overlap<F: Fn(&SphereGrid) -> (Vec<f64>, Vec<f64>)>(j: SpinLength, f: F) -> Result<f64> {
    let mut vals = [0.0; 2];
    for (slot, factor) in [1, 2].into_iter().enumerate() {
        let g = SphereGrid::for_spin_refined(j, factor);
        let (a, b) = f(&g);
        vals[slot] = bhattacharyya_overlap(&g, &a, &b, NORM_TOL)?;
    }
    if (vals[0] - vals[1]).abs() > REFINE_TOL {
        return Err(Error::Convergence(format!("overlap {} vs {} after grid doubling", vals[0], vals[1])));
    }
    Ok(vals[1])
}

/// `1 - int sqrt(Q * sum_s w_s Q_s)` for a measurement without subsequent
/// evolution.
pub fn mixture_condition_gap(state: &SpinState, povm: &CoarsePOVM) -> Result<f64> {
    check_dim(state, povm)?;
    let overlap = resolved_overlap(state.j, |g| (q_on_grid(state, g), branch_mixture_q(state, povm, None, g)))?;
    Ok(1.0 - overlap)
}

/// `1 - overlap` between `Q(rho(tj))` and the mixture of branches measured at
/// `ti` and evolved to `tj`.
pub fn noninvasiveness_gap(
    rho0: &SpinState,
    evo: &dyn Evolution,
    povm: &CoarsePOVM,
    ti: f64,
    tj: f64,
) -> Result<f64> {
    check_dim(rho0, povm)?;
    if ti > tj {
        return Err(Error::Parameter(format!("times out of order: {ti} > {tj}")));
    }
    let rho_i = rho0.evolve(&evo.propagator(ti));
    let u = evo.propagator(tj - ti);
    let rho_j = rho_i.evolve(&u);
    let overlap = resolved_overlap(rho0.j, |g| (q_on_grid(&rho_j, g), branch_mixture_q(&rho_i, povm, Some(&u), g)))?;
    Ok(1.0 - overlap)
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub leakages: Vec<f64>,
    pub max: f64,
    /// Fraction of samples with leakage above `0.1`.
    pub border_fraction: f64,
}

/// For each `(Omega, t)`: `1 - max_s ||P_s U(t)|Omega>||^2`.
pub fn sufficient_condition_check(
    evo: &dyn Evolution,
    povm: &CoarsePOVM,
    samples: &[(Direction, f64)],
) -> Result<LeakageReport> {
    if evo.dim() != povm.j.dim() {
        return Err(Error::Dimension { expected: povm.j.dim(), got: evo.dim() });
    }
    // Samples sharing a time reuse the propagator of their predecessor.
    let mut last: Option<(f64, Operator)> = None;
    let leakages: Vec<f64> = samples
        .iter()
        .map(|(dir, t)| {
            if last.as_ref().map_or(true, |(s, _)| s != t) {
                last = Some((*t, evo.propagator(*t)));
            }
            let psi = &last.as_ref().expect("set above").1 * coherent_ket(povm.j, dir);
            let pop: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
            let best = povm
                .elements
                .iter()
                .map(|e| e.iter().zip(&pop).map(|(g, p)| g * g * p).sum::<f64>())
                .fold(0.0, f64::max);
            (1.0 - best).max(0.0)
        })
        .collect();
    let max = leakages.iter().copied().fold(0.0, f64::max);
    let border = leakages.iter().filter(|&&l| l > 0.1).count();
    let border_fraction = if samples.is_empty() { 0.0 } else { border as f64 / samples.len() as f64 };
    Ok(LeakageReport { leakages, max, border_fraction })
}

/// Joint outcome probabilities `p[k][l] = Tr[P_l U M_k rho(ti) M_k U^dag]`
/// for POVM outcomes at `ti` and `tj`.
pub fn povm_joint_probabilities(
    rho0: &SpinState,
    evo: &dyn Evolution,
    povm: &CoarsePOVM,
    ti: f64,
    tj: f64,
) -> Result<Vec<Vec<f64>>> {
    check_dim(rho0, povm)?;
    if ti > tj {
        return Err(Error::Parameter(format!("times out of order: {ti} > {tj}")));
    }
    let rho_i = rho0.evolve(&evo.propagator(ti));
    let u = evo.propagator(tj - ti);
    let ens = rho_i.ensemble();
    Ok(povm
        .kraus
        .iter()
        .map(|k| {
            let mut pop = vec![0.0; povm.j.dim()];
            for (w, psi) in &ens {
                let b = &u * scale_ket(k, psi);
                pop.iter_mut().zip(b.iter()).for_each(|(p, z)| *p += w * z.norm_sqr());
            }
            povm.elements.iter().map(|e| e.iter().zip(&pop).map(|(g, p)| g * p).sum()).collect()
        })
        .collect())
}

/// `C = sum_{k,l} s_k s_l p[k][l]` for outcome values `s`.
pub fn povm_two_time_correlation(
    rho0: &SpinState,
    evo: &dyn Evolution,
    povm: &CoarsePOVM,
    values: &[f64],
    ti: f64,
    tj: f64,
) -> Result<f64> {
    if values.len() != povm.len() {
        return Err(Error::Dimension { expected: povm.len(), got: values.len() });
    }
    let p = povm_joint_probabilities(rho0, evo, povm, ti, tj)?;
    Ok(p.iter()
        .enumerate()
        .map(|(k, row)| row.iter().enumerate().map(|(l, v)| values[k] * values[l] * v).sum::<f64>())
        .sum())
}

/// Angle `kappa` of the single rotation equivalent to the sequence in the
/// characteristic function: `cos(kappa/2) = cos(xi/2) cos(eta/2) - sin(xi/2) sin(eta/2) cos(theta)`.
pub fn char_fn_kappa(xi: f64, eta: f64, theta: f64) -> f64 {
    let c = (xi / 2.0).cos() * (eta / 2.0).cos() - (xi / 2.0).sin() * (eta / 2.0).sin() * theta.cos();
    2.0 * c.clamp(-1.0, 1.0).acos()
}

/// `sin((2j+1) kappa/2) / ((2j+1) sin(kappa/2))`: the Fourier transform of the
/// joint `J_z` statistics at two times separated by a rotation `theta` about
/// `x`, starting from the maximally mixed state.
pub fn quantum_char_fn(j: SpinLength, xi: f64, eta: f64, theta: f64) -> f64 {
    parity_correlation_with(j, char_fn_kappa(xi, eta, theta) / 2.0, 1e-8)
}

/// `sin((2j+1) k/2) / ((2j+1) k/2)` with `k^2 = xi^2 + eta^2 + 2 xi eta cos theta`.
pub fn classical_char_fn(j: SpinLength, xi: f64, eta: f64, theta: f64) -> f64 {
    let k = (xi * xi + eta * eta + 2.0 * xi * eta * theta.cos()).max(0.0).sqrt();
    let x = j.dim() as f64 * k / 2.0;
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sum_{m1,m2} e^{i(xi m1 + eta m2)} |<m2|e^{-i theta J_x}|m1>|^2 / (2j+1)`,
/// summed explicitly.
pub fn char_fn_brute_force(j: SpinLength, xi: f64, eta: f64, theta: f64) -> f64 {
    let u = crate::spin::rotation_evolution(j, theta);
    let d = j.dim();
    let mut s = C64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            let ph = C64::from_polar(1.0, xi * j.m(a) + eta * j.m(b));
            s += ph * u[(b, a)].norm_sqr();
        }
    }
    s.re / d as f64
}
