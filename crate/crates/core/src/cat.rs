//! The oscillating cat `H = i w (|-j><+j| - |+j><-j|)`.
//!
//! Starting from `|+j>` it produces `cos(wt)|+j> + sin(wt)|-j>`. The module
//! covers its coarse-grained Leggett-Garg test, the alternating
//! evolve-and-dephase decoherence model, a qubit-chain circuit reproducing the
//! same amplitudes, and the information content of sharp and coarse outcomes.

use serde::Serialize;

use crate::coarse::{build_povm, make_partition, povm_two_time_correlation, vn_slot_projector, PartitionMode};
use crate::error::{Error, Result};
use crate::lg::{lg_chsh, lg_wigner, two_time_correlation, DichotomicObservable, LgResult};
use crate::spin::{Evolution, Ket, Operator, SpinLength, SpinState};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatModel {
    pub j: SpinLength,
    pub omega: f64,
}

impl CatModel {
    pub fn hamiltonian(&self) -> Operator {
        let d = self.j.dim();
        let mut h = Operator::zeros(d, d);
        h[(d - 1, 0)] = C64::new(0.0, self.omega);
        h[(0, d - 1)] = C64::new(0.0, -self.omega);
        h
    }
}

impl Evolution for CatModel {
    fn dim(&self) -> usize {
        self.j.dim()
    }

    /// `U = cos(wt)(|+j><+j| + |-j><-j|) + sin(wt)(|-j><+j| - |+j><-j|)` plus the
    /// identity on the remaining states.
    fn propagator(&self, t: f64) -> Operator {
        let d = self.j.dim();
        let (s, c) = (self.omega * t).sin_cos();
        let mut u = Operator::identity(d, d);
        u[(0, 0)] = C64::new(c, 0.0);
        u[(d - 1, d - 1)] = C64::new(c, 0.0);
        u[(d - 1, 0)] = C64::new(s, 0.0);
        u[(0, d - 1)] = C64::new(-s, 0.0);
        u
    }
}

pub fn cat_state(model: &CatModel, t: f64) -> SpinState {
    let d = model.j.dim();
    let (s, c) = (model.omega * t).sin_cos();
    let mut v = Ket::zeros(d);
    v[0] = C64::new(c, 0.0);
    v[d - 1] += C64::new(s, 0.0);
    SpinState::pure(model.j, v).expect("unit norm by construction")
}

/// `cos^2(wt)|+j><+j| + sin^2(wt)|-j><-j|`.
pub fn cat_mixture(model: &CatModel, t: f64) -> SpinState {
    let d = model.j.dim();
    let c2 = (model.omega * t).cos().powi(2);
    let mut rho = Operator::zeros(d, d);
    rho[(0, 0)] += C64::new(c2, 0.0);
    rho[(d - 1, d - 1)] += C64::new(1.0 - c2, 0.0);
    SpinState::mixed(model.j, rho).expect("valid mixture")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Detector {
    /// Coherent-state hemisphere POVM.
    Povm,
    /// Sharp hemisphere projectors.
    VonNeumann,
}

/// Leggett-Garg combination for which-hemisphere measurements on the cat
/// started in `|+j>` at `t = 0`. Three times give the three-time form, four
/// the four-time form.
pub fn hemisphere_lg(model: &CatModel, times: &[f64], detector: Detector) -> Result<LgResult> {
    let part = make_partition(model.j, 1.0, PartitionMode::Hemispheres)?;
    let rho0 = cat_state(model, 0.0);
    let corr: Box<dyn FnMut(f64, f64) -> Result<f64> + '_> = match detector {
        Detector::Povm => {
            let povm = build_povm(&part);
            Box::new(move |a, b| povm_two_time_correlation(&rho0, model, &povm, &[1.0, -1.0], a, b))
        }
        Detector::VonNeumann => {
            let obs = DichotomicObservable::from_projector(vn_slot_projector(&part, 0)?)?;
            Box::new(move |a, b| two_time_correlation(&rho0, model, &obs, a, b))
        }
    };
    match *times {
        [a, b, c] => lg_wigner(corr, [a, b, c]),
        [a, b, c, d] => lg_chsh(corr, [a, b, c, d]),
        _ => Err(Error::Parameter(format!("expected 3 or 4 times, got {}", times.len()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecoherenceRegime {
    /// `0 < 2a - 1 < 1`: monotone approach to 1/2.
    Decaying,
    /// `-1 < 2a - 1 < 0`: the deviation from 1/2 changes sign every step.
    Alternating,
    /// `a = 1/2`: equal mixture after one step.
    Immediate,
    /// `a = 1`: no evolution between dephasing events.
    Frozen,
    /// `a = 0`: the state flips between the poles every step.
    Flipping,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoherenceTrace {
    pub dt: f64,
    pub omega: f64,
    /// `cos^2(w dt)`.
    pub a: f64,
    /// Survival probabilities `A_0 = 1, A_1, ...`.
    pub survival: Vec<f64>,
    /// Rate of `A(t) = (1 + e^{-nu t}) / 2`; zero for the frozen and flipping
    /// cases, infinite for the immediate one.
    pub nu: f64,
    pub regime: DecoherenceRegime,
}

impl DecoherenceTrace {
    pub fn fitted(&self, t: f64) -> f64 {
        0.5 * (1.0 + (-self.nu * t).exp())
    }
}

/// `A_n = a A_{n-1} + (1 - a)(1 - A_{n-1})` for `n = 1..=n_steps`.
pub fn decoherence_trace(model: &CatModel, dt: f64, n_steps: usize) -> Result<DecoherenceTrace> {
    if n_steps == 0 {
        return Err(Error::Parameter("n_steps must be at least 1".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("dt = {dt} must be positive")));
    }
    let a = (model.omega * dt).cos().powi(2);
    let mut survival = Vec::with_capacity(n_steps + 1);
    survival.push(1.0);
    for n in 1..=n_steps {
        let prev = survival[n - 1];
        survival.push(a * prev + (1.0 - a) * (1.0 - prev));
    }
    let r = 2.0 * a - 1.0;
    let regime = if (1.0 - a).abs() < 1e-15 {
        DecoherenceRegime::Frozen
    } else if a < 1e-15 {
        DecoherenceRegime::Flipping
    } else if r.abs() < 1e-15 {
        DecoherenceRegime::Immediate
    } else if r > 0.0 {
        DecoherenceRegime::Decaying
    } else {
        DecoherenceRegime::Alternating
    };
    let nu = match regime {
        DecoherenceRegime::Frozen | DecoherenceRegime::Flipping => 0.0,
        DecoherenceRegime::Immediate => f64::INFINITY,
        _ => {
            // Least squares through the origin, matching A(0) = 1.
            let (mut sty, mut stt) = (0.0, 0.0);
            for (n, &s) in survival.iter().enumerate().skip(1) {
                let dev = (2.0 * s - 1.0).abs();
                if dev > 1e-6 {
                    let t = n as f64 * dt;
                    sty += t * dev.ln();
                    stt += t * t;
                }
            }
            if stt == 0.0 {
                f64::INFINITY
            } else {
                -sty / stt
            }
        }
    };
    Ok(DecoherenceTrace { dt, omega: model.omega, a, survival, nu, regime })
}

/// `|A(tj) - [A(ti) A(tj-ti) + (1 - A(ti))(1 - A(tj-ti))]|`: the north weight
/// without a measurement against the weight after a hemisphere measurement at
/// `ti`, for a survival law `A` of a system confined to the two poles.
pub fn survival_law_gap<F: Fn(f64) -> f64>(law: F, ti: f64, tj: f64) -> Result<f64> {
    if ti > tj {
        return Err(Error::Parameter(format!("times out of order: {ti} > {tj}")));
    }
    let (ai, ad) = (law(ti), law(tj - ti));
    Ok((law(tj) - (ai * ad + (1.0 - ai) * (1.0 - ad))).abs())
}

/// The same comparison on the step grid of a trace, using its survival values.
pub fn decohered_noninvasiveness(trace: &DecoherenceTrace, i: usize, j: usize) -> Result<f64> {
    let n = trace.survival.len();
    if i > j || j >= n {
        return Err(Error::Parameter(format!("steps ({i}, {j}) not ordered within 0..{n}")));
    }
    let a = &trace.survival;
    Ok((a[j] - (a[i] * a[j - i] + (1.0 - a[i]) * (1.0 - a[j - i]))).abs())
}

pub const MAX_CIRCUIT_QUBITS: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct CircuitResult {
    /// Amplitude of `|1...1>` (all up, `|+j>`).
    pub all_up: f64,
    /// Amplitude of `|0...0>` (all down, `|-j>`).
    pub all_down: f64,
    /// Norm of everything else.
    pub residual: f64,
    pub rotations: usize,
    pub cnots: usize,
    /// Gates used in each interval.
    pub per_interval: Vec<usize>,
}

fn rotate_first(state: &mut [f64], angle: f64) {
    let (s, c) = angle.sin_cos();
    for idx in (0..state.len()).step_by(2) {
        // bit 0 is qubit 1; |1> -> c|1> + s|0>, |0> -> c|0> - s|1>.
        let (z, o) = (state[idx], state[idx + 1]);
        state[idx] = c * z + s * o;
        state[idx + 1] = c * o - s * z;
    }
}

/// NOT on `target` when `control` reads 0.
fn zero_controlled_not(state: &mut [f64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for idx in 0..state.len() {
        if idx & cm == 0 && idx & tm == 0 {
            state.swap(idx, idx | tm);
        }
    }
}

/// Nearest-neighbour gate sequence taking `|1...1>` to
/// `cos(k w dt)|1...1> + sin(k w dt)|0...0>` after `k` intervals: rotate the
/// first qubit, then a ladder of controlled NOTs; later intervals first undo
/// the ladder. The ladder flips the target when the control is 0, which is
/// the polarity that maps `|0 1...1>` to `|0...0>`.
pub fn cat_circuit_simulate(n_qubits: usize, omega_dt: f64, n_intervals: usize) -> Result<CircuitResult> {
    if !(1..=MAX_CIRCUIT_QUBITS).contains(&n_qubits) {
        return Err(Error::Parameter(format!("qubit count {n_qubits} outside 1..={MAX_CIRCUIT_QUBITS}")));
    }
    let dim = 1usize << n_qubits;
    let mut state = vec![0.0; dim];
    state[dim - 1] = 1.0;
    let (mut rotations, mut cnots) = (0, 0);
    let mut per_interval = Vec::with_capacity(n_intervals);
    for k in 0..n_intervals {
        let before = rotations + cnots;
        if k > 0 {
            for q in (0..n_qubits - 1).rev() {
                zero_controlled_not(&mut state, q, q + 1);
                cnots += 1;
            }
        }
        rotate_first(&mut state, omega_dt);
        rotations += 1;
        for q in 0..n_qubits - 1 {
            zero_controlled_not(&mut state, q, q + 1);
            cnots += 1;
        }
        per_interval.push(rotations + cnots - before);
    }
    let (all_up, all_down) = (state[dim - 1], state[0]);
    let residual = state[1..dim - 1].iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(CircuitResult { all_up, all_down, residual, rotations, cnots, per_interval })
}

/// `(1 + log2 j, 1 - log2 c + log2(j) / 2)`: bits carried by a sharp outcome
/// and by a slot of width `c sqrt(j)`.
pub fn info_bits(j: f64, c: f64) -> Result<(f64, f64)> {
    if !(j >= 1.0 && c >= 1.0 && j.is_finite() && c.is_finite()) {
        return Err(Error::Parameter(format!("need j >= 1 and c >= 1, got j = {j}, c = {c}")));
    }
    Ok((1.0 + j.log2(), 1.0 - c.log2() + 0.5 * j.log2()))
}
