use std::f64::consts::PI;

use macrolab_core::cat::*;
use macrolab_core::coarse::{build_povm, make_partition, slot_probabilities, PartitionMode};
use macrolab_core::spin::{bhattacharyya_overlap, q_on_grid, SphereGrid};
use macrolab_core::{Evolution, Hamiltonian, Ket, Operator, SpinLength, SpinState, C64};
use proptest::prelude::*;

fn model(j: f64) -> CatModel {
    CatModel { j: SpinLength::new(j).unwrap(), omega: 1.3 }
}

/// `exp(-i H t)` by scaling and squaring of a Taylor series.
fn expm_taylor(h: &Operator, t: f64) -> Operator {
    let d = h.nrows();
    let a = h * C64::new(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let a = a.unscale(2f64.powi(s));
    let mut term = Operator::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn cat_state_examples() {
    let m = model(10.0);
    let d = m.j.dim();
    let up = SpinState::basis(m.j, 10.0).unwrap();
    assert_eq!(cat_state(&m, 0.0), up);
    let half = cat_state(&m, PI / (2.0 * m.omega));
    assert!((half.fidelity_with_pure(&SpinState::basis(m.j, -10.0).unwrap().density().column(d - 1).into_owned()) - 1.0).abs() < 1e-15);

    let povm = build_povm(&make_partition(m.j, 1.0, PartitionMode::Hemispheres).unwrap());
    let w = slot_probabilities(&cat_state(&m, PI / (4.0 * m.omega)), &povm).unwrap();
    let bound = 2f64.powi(-20);
    assert!((w[0] - 0.5).abs() < bound && (w[1] - 0.5).abs() < bound);
}

#[test]
fn propagator_matches_matrix_exponential() {
    let m = model(3.5);
    let h = m.hamiltonian();
    let eig = Hamiltonian::new(&h).unwrap();
    for t in [0.2, 1.0, 4.7] {
        let closed = m.propagator(t);
        for other in [expm_taylor(&h, t), eig.propagator(t)] {
            assert!((&closed - other).iter().all(|z| z.norm() < 1e-10));
        }
        let psi = expm_taylor(&h, t).column(0).into_owned();
        assert!(cat_state(&m, t).fidelity_with_pure(&psi) > 1.0 - 1e-12);
    }
}

#[test]
fn hemisphere_correlations_follow_double_angle() {
    // With amplitudes cos(wt), sin(wt) the hemisphere sign correlates as
    // cos(2 w dt), so the four-time maximum sits at w dt = pi/8.
    let m = CatModel { j: SpinLength::new(50.0).unwrap(), omega: 1.0 };
    let dt = PI / 8.0;
    let r = hemisphere_lg(&m, &[0.0, dt, 2.0 * dt, 3.0 * dt], Detector::Povm).unwrap();
    assert!((r.k - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", r.k);
    assert!(r.violated);

    let r = hemisphere_lg(&m, &[0.0, PI / 4.0, PI / 2.0, 0.75 * PI], Detector::Povm).unwrap();
    assert!(r.correlations.iter().all(|c| c.abs() < 1e-12 || (c + 1.0).abs() < 1e-12));

    let three = hemisphere_lg(&m, &[0.0, PI / 6.0, PI / 3.0], Detector::Povm).unwrap();
    assert!((three.k - 1.5).abs() < 1e-6);
    assert!(hemisphere_lg(&m, &[0.0, 1.0], Detector::Povm).is_err());

    let sharp = hemisphere_lg(&m, &[0.0, dt, 2.0 * dt, 3.0 * dt], Detector::VonNeumann).unwrap();
    assert!((sharp.k - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn cos_law_deviation_shrinks_with_j() {
    let dev = |j: f64| {
        let m = CatModel { j: SpinLength::new(j).unwrap(), omega: 1.0 };
        let times = [0.0, 0.3, 0.7, 1.2];
        let r = hemisphere_lg(&m, &times, Detector::Povm).unwrap();
        let pairs = [(0, 1), (1, 2), (2, 3), (0, 3)];
        r.correlations
            .iter()
            .zip(pairs)
            .map(|(c, (a, b))| (c - (2.0 * (times[b] - times[a])).cos()).abs())
            .fold(0.0, f64::max)
    };
    let (d5, d100) = (dev(5.0), dev(100.0));
    assert!(d5 < 10.0 * 2f64.powi(-10), "{d5}");
    assert!(d100 < d5 && d100 < 1e-12, "{d5} {d100}");
}

#[test]
fn decoherence_examples() {
    let m = model(20.0);
    let dt = PI / (10.0 * m.omega);
    let tr = decoherence_trace(&m, dt, 50).unwrap();
    assert_eq!(tr.survival[0], 1.0);
    assert!((tr.survival[1] - (m.omega * dt).cos().powi(2)).abs() < 1e-15);
    assert_eq!(tr.regime, DecoherenceRegime::Decaying);
    assert!(tr.survival.windows(2).all(|w| w[1] <= w[0] && w[1] >= 0.5));
    assert!((tr.survival[50] - 0.5).abs() < 1e-4);
    for (n, &a) in tr.survival.iter().enumerate() {
        assert!((tr.fitted(n as f64 * dt) - a).abs() < 0.01);
    }
    assert!(decoherence_trace(&m, dt, 0).is_err());
    assert!(decoherence_trace(&m, -1.0, 3).is_err());
}

#[test]
fn decoherence_degenerate_cases() {
    let m = CatModel { j: SpinLength::new(2.0).unwrap(), omega: 1.0 };
    let frozen = decoherence_trace(&m, 2.0 * PI, 5).unwrap();
    assert_eq!(frozen.regime, DecoherenceRegime::Frozen);
    assert_eq!(frozen.nu, 0.0);
    let flip = decoherence_trace(&m, PI / 2.0, 5).unwrap();
    assert_eq!(flip.regime, DecoherenceRegime::Flipping);
    assert!(flip.survival.iter().enumerate().all(|(n, &a)| (a - if n % 2 == 0 { 1.0 } else { 0.0 }).abs() < 1e-12));
    let now = decoherence_trace(&m, PI / 4.0, 5).unwrap();
    assert_eq!(now.regime, DecoherenceRegime::Immediate);
    assert!(now.nu.is_infinite());
    let alt = decoherence_trace(&m, 0.4 * PI, 8).unwrap();
    assert_eq!(alt.regime, DecoherenceRegime::Alternating);
    assert!((alt.survival[1] - 0.5) * (alt.survival[2] - 0.5) < 0.0);
}

#[test]
fn decohered_noninvasiveness_examples() {
    let m = model(20.0);
    let dt = PI / (10.0 * m.omega);
    let tr = decoherence_trace(&m, dt, 40).unwrap();
    for i in 0..=40 {
        for j in i..=40 {
            assert!(decohered_noninvasiveness(&tr, i, j).unwrap() < 1e-12);
            let (ti, tj) = (i as f64 * dt, j as f64 * dt);
            assert!(survival_law_gap(|t| tr.fitted(t), ti, tj).unwrap() < 1e-10);
        }
    }
    assert!(decohered_noninvasiveness(&tr, 3, 2).is_err());
    assert_eq!(decohered_noninvasiveness(&tr, 7, 7).unwrap(), 0.0);

    let w = m.omega;
    let bare = |t: f64| (w * t).cos().powi(2);
    let g = survival_law_gap(bare, PI / (4.0 * w), PI / (2.0 * w)).unwrap();
    assert!(g > 0.3, "{g}");
}

#[test]
fn superposition_and_mixture_look_alike() {
    for jv in [20.0, 30.0] {
        let m = model(jv);
        let t = PI / (4.0 * m.omega);
        let grid = SphereGrid::for_spin(m.j);
        let qs = q_on_grid(&cat_state(&m, t), &grid);
        let qm = q_on_grid(&cat_mixture(&m, t), &grid);
        let ov = bhattacharyya_overlap(&grid, &qs, &qm, 1e-8).unwrap();
        assert!(ov >= 1.0 - 2f64.powi(-(jv as i32)), "j={jv}: {ov}");
    }
}

#[test]
fn equatorial_band_is_skipped() {
    let m = model(20.0);
    let part = make_partition(m.j, m.j.dim() as f64 / 3.0, PartitionMode::Aligned).unwrap();
    assert_eq!(part.len(), 3);
    let povm = build_povm(&part);
    for k in 0..=40 {
        let t = k as f64 / 40.0 * PI / (2.0 * m.omega);
        let w = slot_probabilities(&cat_state(&m, t), &povm).unwrap();
        assert!(w[1] < 10.0 * 2f64.powi(-20), "{t}: {}", w[1]);
    }
    let end = slot_probabilities(&cat_state(&m, PI / (2.0 * m.omega)), &povm).unwrap();
    assert!(end[2] > 1.0 - 1e-6);
}

#[test]
fn circuit_examples() {
    let r = cat_circuit_simulate(3, 0.3, 1).unwrap();
    assert!((r.all_up - 0.3f64.cos()).abs() < 1e-12 && (r.all_down - 0.3f64.sin()).abs() < 1e-12);
    assert!(r.residual < 1e-12);
    assert_eq!(r.per_interval, vec![3]);

    let r10 = cat_circuit_simulate(10, 0.1, 4).unwrap();
    let r5 = cat_circuit_simulate(5, 0.1, 4).unwrap();
    assert_eq!(r10.per_interval, vec![10, 19, 19, 19]);
    assert_eq!(r5.per_interval, vec![5, 9, 9, 9]);
    assert_eq!(r10.rotations, 4);
    assert_eq!(r10.cnots, 9 + 3 * 18);
    assert!(cat_circuit_simulate(21, 0.1, 1).is_err());
    assert!(cat_circuit_simulate(0, 0.1, 1).is_err());

    let one = cat_circuit_simulate(1, 0.4, 3).unwrap();
    assert!((one.all_up - 1.2f64.cos()).abs() < 1e-12);
}

#[test]
fn circuit_matches_continuum() {
    let n = 8;
    let m = CatModel { j: SpinLength::from_twice(n as u32).unwrap(), omega: 1.0 };
    let r = cat_circuit_simulate(n, 0.17, 9).unwrap();
    let psi: Ket = match cat_state(&m, 9.0 * 0.17).repr {
        macrolab_core::StateRepr::Pure(v) => v,
        _ => unreachable!(),
    };
    assert!((r.all_up - psi[0].re).abs() < 1e-10);
    assert!((r.all_down - psi[n].re).abs() < 1e-10);
    assert!(r.residual < 1e-10);
}

#[test]
fn information_counts() {
    let (s, c) = info_bits(2f64.powi(20), 2f64.powi(5)).unwrap();
    assert_eq!((s, c), (21.0, 6.0));
    let (_, c1) = info_bits(64.0, 1.0).unwrap();
    assert_eq!(c1, 4.0);
    let ratios: Vec<f64> = [30, 40, 60, 100, 200]
        .iter()
        .map(|&e| {
            let (s, c) = info_bits(2f64.powi(e), 32.0).unwrap();
            c / s
        })
        .collect();
    assert!((ratios[1] - 16.0 / 41.0).abs() < 1e-12);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    assert!(ratios.iter().all(|&r| r < 0.5));
    assert!(info_bits(0.5, 2.0).is_err() && info_bits(4.0, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_closed_form(wdt in 0.0..3.2f64, n in 1usize..200) {
        let m = CatModel { j: SpinLength::new(1.0).unwrap(), omega: 1.0 };
        let tr = decoherence_trace(&m, wdt.max(1e-9), n).unwrap();
        let r = 2.0 * tr.a - 1.0;
        for (k, &a) in tr.survival.iter().enumerate() {
            prop_assert!((a - 0.5 * (1.0 + r.powi(k as i32))).abs() < 1e-14);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn circuit_composes_angles(n in 1usize..10, x in -1.0..1.0f64, k in 1usize..12) {
        let r = cat_circuit_simulate(n, x, k).unwrap();
        let th = k as f64 * x;
        prop_assert!((r.all_up - th.cos()).abs() < 1e-10);
        prop_assert!((r.all_down - th.sin()).abs() < 1e-10);
    }
}
