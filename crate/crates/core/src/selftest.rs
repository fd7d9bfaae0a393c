//! Acceptance criteria as runnable checks.
//!
//! Each criterion returns a [`Criterion`] with a pass flag and a one-line
//! detail. Criteria that cannot be met report `pass = false`; nothing here
//! panics on a failed check.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cat::{decoherence_trace, decohered_noninvasiveness, survival_law_gap, CatModel};
use crate::chain::{chain_point, epsilon, field_covariance, BlockSpec};
use crate::coarse::{
    build_povm, classical_char_fn, make_partition, mixture_condition_gap, noninvasiveness_gap, quantum_char_fn,
    PartitionMode,
};
use crate::ensemble::{
    admixture_collective, dicke_collective, negativity, convexity_check, singlet_collective, virtual_qubit_state,
    CollectiveMoments, PairState,
};
use crate::error::Result;
use crate::lg::{
    analytic_k_parity, analytic_k_parity_extremes, chsh_spin_half, lg_chsh, lg_wigner_from_amplitudes,
    macrorealistic_k_values, parity_pipeline_k, two_time_correlation, wigner_two_level, DichotomicObservable,
};
use crate::spin::{
    build_spin_operators, coherent_state, p_expansion, reconstruct_from_p, Direction, Ket, Operator, RotationX,
    SpinLength, SpinState,
};
use crate::undecidable::{decidable_randomness_audit, ghz_contradiction, AxiomSet, PauliString};
use crate::C64;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict} {:<28} {} ({:.2} s)", self.id, self.detail, self.seconds)
    }
}

type Check = fn() -> Result<(bool, String)>;

struct Entry {
    id: &'static str,
    title: &'static str,
    modules: &'static [&'static str],
    budget: f64,
    check: Check,
}

const ENTRIES: &[Entry] = &[
    Entry { id: "lg-spin-half-maximum", title: "spin-1/2 LG maximum", modules: &["lg"], budget: 1.0, check: spin_half_maximum },
    Entry { id: "lg-parity-violation", title: "large-spin parity violation", modules: &["lg"], budget: 30.0, check: parity_violation },
    Entry { id: "lg-wigner-maximum", title: "two-level Wigner-type maximum", modules: &["lg"], budget: f64::INFINITY, check: wigner_maximum },
    Entry { id: "coarse-which-hemisphere", title: "which-hemisphere worst case", modules: &["coarse"], budget: 120.0, check: which_hemisphere },
    Entry { id: "coarse-rotation-macrorealism", title: "rotation macrorealism", modules: &["coarse", "cat"], budget: f64::INFINITY, check: rotation_macrorealism },
    Entry { id: "cat-decoherence-restoration", title: "decoherence restoration", modules: &["cat"], budget: f64::INFINITY, check: decoherence_restoration },
    Entry { id: "coarse-char-fn-limit", title: "characteristic-function limit", modules: &["coarse"], budget: f64::INFINITY, check: char_fn_limit },
    Entry { id: "chain-structure", title: "chain entanglement structure", modules: &["chain"], budget: 60.0, check: chain_structure },
    Entry { id: "chain-field-null", title: "field null result", modules: &["chain"], budget: f64::INFINITY, check: field_null },
    Entry { id: "ensemble-closed-forms", title: "ensemble closed forms", modules: &["ensemble"], budget: 30.0, check: ensemble_closed_forms },
    Entry { id: "undecidability-audit", title: "undecidability audit", modules: &["undecidability"], budget: 60.0, check: undecidability_audit },
    Entry { id: "property-suites", title: "property suites", modules: &["spin", "lg", "coarse", "ensemble"], budget: 300.0, check: property_suites },
];

/// Identifiers of every criterion, in order.
pub fn ids() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.id).collect()
}

fn evaluate(e: &Entry) -> Criterion {
    let start = Instant::now();
    let outcome = (e.check)();
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = match outcome {
        Ok(v) => v,
        Err(err) => (false, format!("error: {err}")),
    };
    if seconds > e.budget {
        pass = false;
        detail.push_str(&format!("; runtime {seconds:.1} s over budget {:.0} s", e.budget));
    }
    Criterion { id: e.id, title: e.title, pass, detail, seconds }
}

pub fn run(id: &str) -> Option<Criterion> {
    ENTRIES.iter().find(|e| e.id == id).map(evaluate)
}

pub fn run_all() -> Vec<Criterion> {
    ENTRIES.iter().map(evaluate).collect()
}

/// Criteria touching one of `spin`, `lg`, `coarse`, `cat`, `chain`, `ensemble`, `undecidability`.
pub fn run_module(module: &str) -> Vec<Criterion> {
    ENTRIES.iter().filter(|e| e.modules.contains(&module)).map(evaluate).collect()
}

fn sj(j: f64) -> SpinLength {
    SpinLength::new(j).expect("valid spin length")
}

fn spin_half_maximum() -> Result<(bool, String)> {
    let omega = 1.0;
    let dt = PI / (4.0 * omega);
    let analytic = chsh_spin_half(omega * dt);
    let j = sj(0.5);
    let obs = DichotomicObservable::from_involution(&(build_spin_operators(j).jz * C64::new(2.0, 0.0)))?;
    let st = SpinState::maximally_mixed(j);
    let evo = RotationX { j, omega };
    let r = lg_chsh(|a, b| two_time_correlation(&st, &evo, &obs, a, b), [0.0, dt, 2.0 * dt, 3.0 * dt])?;
    let target = 2.0 * 2f64.sqrt();
    let (ea, ep) = ((analytic - target).abs(), (r.k - target).abs());
    Ok((ea < 1e-10 && ep < 1e-9, format!("K analytic {analytic:.12} (err {ea:.1e}), pipeline {:.12} (err {ep:.1e})", r.k)))
}

fn parity_violation() -> Result<(bool, String)> {
    let (xmax, kmax, cross) = analytic_k_parity_extremes()?;
    let j = sj(50.0);
    let mut worst: f64 = 0.0;
    for i in 0..=56 {
        let x = 0.2 + 0.05 * i as f64;
        worst = worst.max((parity_pipeline_k(j, x)? - analytic_k_parity(x)).abs());
    }
    let pass = (xmax - 1.054).abs() <= 0.005 && (kmax - 2.481).abs() <= 0.005 && (cross - 1.656).abs() <= 0.01 && worst < 0.02;
    Ok((pass, format!("peak x={xmax:.4} K={kmax:.4}, crossing x={cross:.4}, j=50 pipeline max dev {worst:.4}")))
}

fn wigner_maximum() -> Result<(bool, String)> {
    let x = PI / 3.0;
    let k = wigner_two_level(x);
    // (|u1> + |u2>)/sqrt 2 with E1 = 0, E2 = dE: <psi0|psi(t)> = (1 + e^{-i dE t}) / 2
    let amp = |t: f64| (C64::new(1.0, 0.0) + C64::from_polar(1.0, -t)) * 0.5;
    let k_amp = lg_wigner_from_amplitudes(amp(x), amp(2.0 * x))?;
    let pass = (k - 1.5).abs() < 1e-10 && (k_amp - 1.5).abs() < 1e-10;
    Ok((pass, format!("K closed form {k:.12}, from survival amplitudes {k_amp:.12}")))
}

fn hemisphere_overlap(jv: f64) -> Result<f64> {
    let j = sj(jv);
    let povm = build_povm(&make_partition(j, 1.0, PartitionMode::Hemispheres)?);
    let eq = coherent_state(j, &Direction::new(PI / 2.0, PI)?);
    Ok(1.0 - mixture_condition_gap(&eq, &povm)?)
}

fn which_hemisphere() -> Result<(bool, String)> {
    let o100 = hemisphere_overlap(100.0)?;
    let o25 = hemisphere_overlap(25.0)?;
    let o400 = hemisphere_overlap(400.0)?;
    let pass = (o100 - 0.997).abs() <= 0.002 && (o25 - o100).abs() <= 0.003 && (o400 - o100).abs() <= 0.003;
    Ok((pass, format!("overlap j=100 {o100:.5}, j=25 {o25:.5}, j=400 {o400:.5}")))
}

fn rotation_macrorealism() -> Result<(bool, String)> {
    let j = sj(100.0);
    let povm = build_povm(&make_partition(j, 1.0, PartitionMode::Hemispheres)?);
    let evo = RotationX { j, omega: 1.0 };
    let st = coherent_state(j, &Direction::new(1.1, 4.0)?);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ti = rng.gen_range(0.0..3.0);
        let tj = ti + rng.gen_range(0.05..3.0);
        worst = worst.max(noninvasiveness_gap(&st, &evo, &povm, ti, tj)?);
    }
    let cat = CatModel { j, omega: 1.0 };
    let cat_gap = noninvasiveness_gap(&SpinState::basis(j, 100.0)?, &cat, &povm, PI / 4.0, PI / 2.0)?;
    let pass = worst < 0.01 && cat_gap > 0.3;
    Ok((pass, format!("rotation max gap {worst:.2e} (< 0.01), cat gap {cat_gap:.4} (> 0.3)")))
}

fn decoherence_restoration() -> Result<(bool, String)> {
    let model = CatModel { j: sj(20.0), omega: 1.0 };
    let dt = PI / 10.0;
    let n = 40;
    let tr = decoherence_trace(&model, dt, n)?;
    let (mut worst, mut bare_max): (f64, f64) = (0.0, 0.0);
    for i in 0..=n {
        for k in i..=n {
            let (ti, tk) = (i as f64 * dt, k as f64 * dt);
            worst = worst.max(decohered_noninvasiveness(&tr, i, k)?);
            worst = worst.max(survival_law_gap(|t| tr.fitted(t), ti, tk)?);
            bare_max = bare_max.max(survival_law_gap(|t| t.cos().powi(2), ti, tk)?);
        }
    }
    let pass = worst < 1e-10 && bare_max > 0.1;
    Ok((pass, format!("exponential law max gap {worst:.1e}, bare cos^2 max gap {bare_max:.4}")))
}

fn char_fn_limit() -> Result<(bool, String)> {
    let j = sj(1e4);
    let gap = |x: f64| [0.3, 1.0, 2.0].iter().map(move |&th| (quantum_char_fn(j, x, x, th) - classical_char_fn(j, x, x, th)).abs());
    let inner = gap(0.1 / j.j().sqrt()).fold(0.0, f64::max);
    let outer = gap(2.0 / j.j().sqrt()).fold(f64::INFINITY, f64::min);
    let pass = inner < 1e-3 && outer > 0.05;
    Ok((pass, format!("|q - c| at 0.1/sqrt(j): max {inner:.1e} (< 1e-3); at 2/sqrt(j): min {outer:.1e} (> 0.05)")))
}

fn chain_structure() -> Result<(bool, String)> {
    let alpha = 0.99;
    let eps = |n: usize, d: usize| chain_point(alpha, &BlockSpec::contiguous(n, d)?).map(|p| p.epsilon);
    let mut fails = Vec::new();
    for n in 1..=8 {
        if eps(n, 0)? <= 0.0 {
            fails.push(format!("d=0 n={n}"));
        }
    }
    for n in 1..=6 {
        let e = eps(n, 1)?;
        if (2..=4).contains(&n) != (e > 0.0) {
            fails.push(format!("d=1 n={n} eps={e:.3e}"));
        }
    }
    for d in 2..=4 {
        for n in 1..=12 {
            let e = eps(n, d)?;
            if e != 0.0 {
                fails.push(format!("d={d} n={n} eps={e:.3e}"));
            }
        }
    }
    let per = |n: usize, s: usize| chain_point(alpha, &BlockSpec::new(s, n / s, 0)?).map(|p| p.epsilon);
    let (e1, e2, e5) = (per(12, 1)?, per(12, 2)?, per(10, 5)?);
    if !(e1 > e2 && e2 > e5) {
        fails.push(format!("periodic ordering {e1:.3} {e2:.3} {e5:.3}"));
    }
    let detail = if fails.is_empty() {
        format!("sign pattern holds; periodic eps(s=1)={e1:.3} > eps(s=2)={e2:.3} > eps(s=5, n=10)={e5:.3}")
    } else {
        format!("violations: {}", fails.join(", "))
    };
    Ok((fails.is_empty(), detail))
}

fn field_null() -> Result<(bool, String)> {
    let mut count = 0;
    let mut nonzero = Vec::new();
    for mass in [0.5, 1.0, 2.0] {
        for l in [1.0, 2.0] {
            for r in [1.5 * l, 2.0 * l, 4.0 * l] {
                let e = epsilon(&field_covariance(mass, l, r)?)?;
                count += 1;
                if e != 0.0 {
                    nonzero.push(format!("(m={mass}, L={l}, r={r}): {e:.3e}"));
                }
            }
        }
    }
    let pass = nonzero.is_empty() && count >= 18;
    Ok((pass, format!("{count} grid points, nonzero: [{}]", nonzero.join(", "))))
}

fn dicke_register(n_total: usize, k: usize) -> Operator {
    let dim = 1usize << n_total;
    let mut psi = Ket::zeros(dim);
    for x in 0..dim {
        if x.count_ones() as usize == k {
            psi[x] = C64::new(1.0, 0.0);
        }
    }
    let psi = psi.unscale(psi.norm());
    &psi * psi.adjoint()
}

fn ensemble_closed_forms() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for nt in [4usize, 8, 20] {
        let target = 1.0 / (2.0 * (nt as f64 - 1.0));
        for n in [1, nt / 2] {
            worst = worst.max((dicke_collective(nt, nt / 2, n)?.1 - target).abs());
        }
    }
    for n in 1..=20 {
        worst = worst.max((singlet_collective(n)? - 0.5 / n as f64).abs());
    }
    let mut nc_ok = true;
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let (_, nc) = admixture_collective(1, p)?;
        let nc = nc.unwrap_or(usize::MAX);
        let expected = ((1.0 + p) / (1.0 - p) - 1e-9).ceil() as usize;
        nc_ok &= nc == expected;
        for n in 1..=nc + 2 {
            let (e, _) = admixture_collective(n, p)?;
            nc_ok &= if n < nc { e > 1e-12 } else { e <= 1e-12 };
        }
    }
    let mut brute: f64 = 0.0;
    for (nt, n) in [(4usize, 1usize), (4, 2), (6, 1), (6, 2), (6, 3)] {
        let rho = dicke_register(nt, nt / 2);
        let a: Vec<usize> = (0..n).collect();
        let b: Vec<usize> = (n..2 * n).collect();
        let m = CollectiveMoments::from_register(&rho, nt, &a, &b)?;
        let e = negativity(&virtual_qubit_state(&m)?);
        brute = brute.max((e - dicke_collective(nt, nt / 2, n)?.1).abs());
    }
    for twice in 1..=4u32 {
        let s = SpinLength::from_twice(twice)?;
        let d = s.dim();
        let mut psi = Ket::zeros(d * d);
        for i in 0..d {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            psi[i * d + (d - 1 - i)] = C64::new(sign / (d as f64).sqrt(), 0.0);
        }
        let m = CollectiveMoments::from_spins(s, &(&psi * psi.adjoint()))?;
        let e = negativity(&virtual_qubit_state(&m)?);
        brute = brute.max((e - singlet_collective(twice as usize)?).abs());
    }
    let pass = worst < 1e-12 && nc_ok && brute < 1e-10;
    Ok((pass, format!("closed-form max dev {worst:.1e}, n_c pattern {}, brute-force max dev {brute:.1e}", if nc_ok { "ok" } else { "broken" })))
}

fn undecidability_audit() -> Result<(bool, String)> {
    let shots = 10_000u64;
    let sigma = 0.5 / (shots as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let (mut undecidable, mut beyond_3s, mut worst_dev) = (0usize, 0usize, 0.0f64);
    for n in 1..=4 {
        let ax = AxiomSet::random(n, &mut rng)?;
        let audit = decidable_randomness_audit(&ax, shots, 7)?;
        ok &= audit.decidable == 1 << n && audit.all_consistent;
        for e in audit.entries.iter().filter(|e| !e.decidability.is_decidable()) {
            undecidable += 1;
            let dev = (e.measurement.frequency_plus() - 0.5).abs();
            worst_dev = worst_dev.max(dev);
            if dev > 3.0 * sigma {
                beyond_3s += 1;
            }
        }
    }
    // 0.02 is the accepted band for 1e4 shots; 3 sigma itself is 0.015.
    ok &= worst_dev < 0.02;
    let ghz = ghz_contradiction()?;
    let rows: Vec<Operator> = ["YYX", "YXY", "XYY"]
        .iter()
        .map(|l| PauliString::from_label(l)?.matrix())
        .collect::<Result<_>>()?;
    let xxx = PauliString::from_label("XXX")?.matrix()?;
    let phase_err = (&rows[0] * &rows[1] * &rows[2] + xxx).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ghz_ok = ghz.logical_bit && !ghz.quantum_bit && ghz.product_sign == -1 && phase_err < 1e-12;
    Ok((
        ok && ghz_ok,
        format!(
            "counts 2^N and determinism<=>decidability {}, {undecidable} undecidable max |f-1/2| {worst_dev:.4} ({beyond_3s} beyond 3 sigma), GHZ classical {} quantum {} sign {}",
            if ok { "hold" } else { "broken" },
            ghz.logical_bit as u8,
            ghz.quantum_bit as u8,
            ghz.product_sign
        ),
    ))
}

fn random_pair_state(rng: &mut ChaCha8Rng) -> Result<PairState> {
    let g = Operator::from_fn(4, 4, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    PairState::new(rho / tr)
}

fn property_suites() -> Result<(bool, String)> {
    let mut fails = Vec::new();
    let max_abs = |m: &Operator| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let i = C64::new(0.0, 1.0);
    for jv in [0.5, 1.0, 1.5, 5.0, 20.0] {
        let o = build_spin_operators(sj(jv));
        let c = |a: &Operator, b: &Operator| a * b - b * a;
        let err = max_abs(&(c(&o.jx, &o.jy) - &o.jz * i))
            .max(max_abs(&(c(&o.jy, &o.jz) - &o.jx * i)))
            .max(max_abs(&(c(&o.jz, &o.jx) - &o.jy * i)));
        if err > 1e-12 {
            fails.push(format!("commutators j={jv}: {err:.1e}"));
        }
    }
    for (jv, dm) in [(10.0, 3.0), (100.0, 20.0), (400.0, 40.0)] {
        let povm = build_povm(&make_partition(sj(jv), dm, PartitionMode::Aligned)?);
        let err = povm.completeness_error().max(povm.kraus_error());
        if err > 1e-10 {
            fails.push(format!("POVM j={jv}: {err:.1e}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for jv in [1.0, 2.5, 6.0, 10.0] {
        let j = sj(jv);
        let v = Ket::from_fn(j.dim(), |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        for st in [SpinState::pure_normalized(j, v.clone())?, coherent_state(j, &Direction::new(0.7, 2.2)?)] {
            let err = max_abs(&(reconstruct_from_p(&p_expansion(&st)?) - st.density()));
            if err > 1e-6 {
                fails.push(format!("Q/P round trip j={jv}: {err:.1e}"));
            }
        }
    }
    let mut min_gap = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let states = (0..n * n).map(|_| random_pair_state(&mut rng)).collect::<Result<Vec<_>>>()?;
        min_gap = min_gap.min(convexity_check(&states)?.gap);
    }
    if min_gap < -1e-12 {
        fails.push(format!("convexity gap {min_gap:.1e}"));
    }
    let ks = macrorealistic_k_values();
    if ks.len() != 16 || ks.iter().any(|(_, k)| *k > 2.0) {
        fails.push("macrorealistic enumeration exceeds 2".into());
    }
    let detail = if fails.is_empty() {
        format!("algebra, POVM, Q/P round trip, convexity (min gap {min_gap:.1e}), K <= 2 over 16 assignments")
    } else {
        fails.join("; ")
    };
    Ok((fails.is_empty(), detail))
}
