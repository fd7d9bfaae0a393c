use std::f64::consts::PI;

use macrolab_core::coarse::*;
use macrolab_core::special::{gauss_legendre, ln_binomial};
use macrolab_core::spin::{coherent_ket, coherent_state};
use macrolab_core::{Direction, Hamiltonian, Ket, Operator, RotationX, SpinLength, SpinState, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sj(j: f64) -> SpinLength {
    SpinLength::new(j).unwrap()
}

fn hemispheres(j: SpinLength) -> CoarsePOVM {
    build_povm(&make_partition(j, 1.0, PartitionMode::Hemispheres).unwrap())
}

fn cat_hamiltonian(j: SpinLength) -> Hamiltonian {
    let d = j.dim();
    let mut h = Operator::zeros(d, d);
    h[(d - 1, 0)] = C64::new(0.0, 1.0);
    h[(0, d - 1)] = C64::new(0.0, -1.0);
    Hamiltonian::new(&h).unwrap()
}

fn equator(j: SpinLength) -> SpinState {
    coherent_state(j, &Direction::new(PI / 2.0, PI).unwrap())
}

/// Gauss-Legendre quadrature of `(2j+1)/2 |<m|theta>|^2` over the band in `cos theta`.
fn coefficient_oracle(j: SpinLength, band: (f64, f64), m: f64) -> f64 {
    let (x, w) = gauss_legendre(4 * j.twice() as usize + 4);
    let (hi, lo) = (band.0.cos(), band.1.cos());
    let n = (j.j() + m).round() as u64;
    let lb = ln_binomial(j.twice() as u64, n);
    x.iter()
        .zip(&w)
        .map(|(t, wt)| {
            let c = (hi + lo) / 2.0 + (hi - lo) / 2.0 * t;
            let ln = lb + n as f64 * ((1.0 + c) / 2.0).ln() + (j.twice() as u64 - n) as f64 * ((1.0 - c) / 2.0).ln();
            wt * (hi - lo) / 2.0 * j.dim() as f64 / 2.0 * ln.exp()
        })
        .sum()
}

fn random_ket(j: SpinLength, rng: &mut ChaCha8Rng) -> Ket {
    let v = Ket::from_fn(j.dim(), |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    v.unscale(v.norm())
}

#[test]
fn partition_shapes() {
    let j = sj(100.0);
    let h = make_partition(j, 1.0, PartitionMode::Hemispheres).unwrap();
    assert_eq!(h.len(), 2);
    assert!((h.bands[0].1 - PI / 2.0).abs() < 1e-15);
    assert_eq!(h.slots[0].len(), 100);
    assert!(h.slots[1].contains(&j.index_of(0.0).unwrap()));

    let one = make_partition(j, 201.0, PartitionMode::Aligned).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one.bands[0], (0.0, PI));

    let p = make_partition(j, 20.0, PartitionMode::Aligned).unwrap();
    assert_eq!(p.len(), 11);
    assert!(p.is_coarse());
    assert!(!make_partition(j, 19.0, PartitionMode::Aligned).unwrap().is_coarse());
    let covered: usize = p.slots.iter().map(Vec::len).sum();
    assert_eq!(covered, 201);
    assert!(p.boundaries.windows(2).all(|w| w[0] < w[1]));
    assert!(p.bands.windows(2).all(|w| w[0].1 == w[1].0));

    assert!(make_partition(j, 0.5, PartitionMode::Aligned).is_err());
    assert!(make_partition(j, 202.0, PartitionMode::Aligned).is_err());
}

#[test]
fn von_neumann_projectors() {
    let j = sj(0.5);
    let h = make_partition(j, 1.0, PartitionMode::Hemispheres).unwrap();
    let p0 = vn_slot_projector(&h, 0).unwrap();
    let p1 = vn_slot_projector(&h, 1).unwrap();
    assert_eq!(p0[(0, 0)], C64::new(1.0, 0.0));
    assert_eq!(p0[(1, 1)], C64::new(0.0, 0.0));
    assert_eq!(p1[(1, 1)], C64::new(1.0, 0.0));
    assert!(vn_slot_projector(&h, 2).is_err());

    let j = sj(100.0);
    let part = make_partition(j, 40.0, PartitionMode::Aligned).unwrap();
    let mut sum = Operator::zeros(201, 201);
    for s in 0..part.len() {
        let p = vn_slot_projector(&part, s).unwrap();
        assert_eq!(&p * &p, p);
        sum += p;
    }
    assert_eq!(sum, Operator::identity(201, 201));

    // A coherent state needs about seven standard deviations of clearance on
    // each side before the sharp projector leaves it alone to 1e-6.
    let part = make_partition(j, 100.0, PartitionMode::Aligned).unwrap();
    let (hi, lo) = part.cuts(0);
    let psi = coherent_ket(j, &Direction::new(((hi + lo) / 2.0 / 100.5).acos(), 0.4).unwrap());
    let p = vn_slot_projector(&part, 0).unwrap();
    assert!((&p * &psi - &psi).norm() < 1e-6);
}

#[test]
fn povm_coefficient_values() {
    let j = sj(100.0);
    for m in [-100.0, -3.0, 0.0, 57.0, 100.0] {
        assert!((povm_coefficient(j, (0.0, PI), m) - 1.0).abs() < 1e-14);
    }
    let north = (0.0, PI / 2.0);
    let g = povm_coefficient(j, north, 100.0);
    assert!((g - coefficient_oracle(j, north, 100.0)).abs() < 1e-12);
    assert!((g - 1.0).abs() < 1e-12);
    assert!((povm_coefficient(j, north, 0.0) - 0.5).abs() < 1e-12);
    assert!((povm_coefficient(j, (PI / 2.0, PI), 0.0) - 0.5).abs() < 1e-12);
}

#[test]
fn povm_coefficient_matches_quadrature() {
    for jv in [3.5, 10.0, 37.5] {
        let j = sj(jv);
        let part = make_partition(j, (2.0 * jv + 1.0) / 4.0, PartitionMode::Aligned).unwrap();
        for &band in &part.bands {
            for m in j.ms() {
                let a = povm_coefficient(j, band, m);
                let b = coefficient_oracle(j, band, m);
                assert!((a - b).abs() < 1e-12, "j={jv} m={m}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn povm_border_profile() {
    let j = sj(100.0);
    let povm = hemispheres(j);
    assert!(povm.completeness_error() < 1e-10);
    assert!(povm.kraus_error() < 1e-10);
    let e = &povm.elements[0];
    assert!(e.as_slice().windows(2).all(|w| w[0] >= w[1]));
    let width = e.iter().filter(|&&g| g > 0.1 && g < 0.9).count();
    assert!((10..=30).contains(&width), "{width}");
    let p = povm.element(0);
    let m = povm.kraus_operator(0);
    assert!((&m * &m - &p).iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn slot_probability_examples() {
    let j = sj(100.0);
    let povm = hemispheres(j);
    let w = slot_probabilities(&SpinState::maximally_mixed(j), &povm).unwrap();
    assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    let w = slot_probabilities(&equator(j), &povm).unwrap();
    assert!((w[0] - 0.5).abs() < 1e-10 && (w[1] - 0.5).abs() < 1e-10);
    let w = slot_probabilities(&SpinState::basis(j, 100.0).unwrap(), &povm).unwrap();
    assert!((w[0] - 1.0).abs() < 1e-10);
    assert!(slot_probabilities(&SpinState::maximally_mixed(sj(3.0)), &povm).is_err());
}

#[test]
fn slot_probability_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (jv, dm) in [(4.5, 3.0), (12.0, 5.0), (30.0, 7.5)] {
        let j = sj(jv);
        let part = make_partition(j, dm, PartitionMode::Aligned).unwrap();
        let povm = build_povm(&part);
        let a = random_ket(j, &mut rng);
        let b = random_ket(j, &mut rng);
        let rho = (&a * a.adjoint()) * C64::new(0.3, 0.0) + (&b * b.adjoint()) * C64::new(0.7, 0.0);
        for st in [SpinState::pure(j, a).unwrap(), SpinState::mixed(j, rho).unwrap()] {
            let tr = slot_probabilities(&st, &povm).unwrap();
            let q = slot_probabilities_from_q(&st, &part);
            assert!((tr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (x, y) in tr.iter().zip(&q) {
                assert!((x - y).abs() < 1e-8, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn reduction_examples() {
    let j = sj(100.0);
    let single = build_povm(&make_partition(j, 201.0, PartitionMode::Aligned).unwrap());
    let st = coherent_state(j, &Direction::new(0.8, 1.1).unwrap());
    let same = reduce_state(&st, &single, 0).unwrap().density() - st.density();
    assert!(same.iter().all(|z| z.norm() < 1e-14));

    let part = make_partition(j, 100.0, PartitionMode::Aligned).unwrap();
    let povm = build_povm(&part);
    let (hi, lo) = part.cuts(0);
    let psi = coherent_ket(j, &Direction::new(((hi + lo) / 2.0 / 100.5).acos(), 2.0).unwrap());
    let st = SpinState::pure(j, psi.clone()).unwrap();
    let red = reduce_state(&st, &povm, 0).unwrap();
    assert!(red.fidelity_with_pure(&psi) > 1.0 - 1e-6);

    let hemi = hemispheres(j);
    assert!(reduce_state(&SpinState::basis(j, 100.0).unwrap(), &hemi, 1).is_err());
    let mixed = SpinState::mixed(j, (equator(j).density() + SpinState::maximally_mixed(j).density()) * C64::new(0.5, 0.0)).unwrap();
    let red = reduce_state(&mixed, &hemi, 1).unwrap();
    assert!((red.density().trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn mixture_condition_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let j = sj(20.0);
    let diag = Ket::from_fn(j.dim(), |_, _| C64::new(rng.gen::<f64>(), 0.0));
    let rho = Operator::from_diagonal(&diag.unscale(diag.iter().map(|z| z.re).sum()));
    let st = SpinState::mixed(j, rho).unwrap();
    let povm = build_povm(&make_partition(j, 6.0, PartitionMode::Aligned).unwrap());
    assert!(mixture_condition_gap(&st, &povm).unwrap().abs() < 1e-9);

    for (jv, tol) in [(25.0, 0.002), (100.0, 0.001)] {
        let j = sj(jv);
        let overlap = 1.0 - mixture_condition_gap(&equator(j), &hemispheres(j)).unwrap();
        assert!((overlap - 0.997).abs() < tol, "j={jv}: {overlap}");
    }
}

#[test]
fn noninvasiveness_examples() {
    let j = sj(100.0);
    let hemi = hemispheres(j);
    let evo = RotationX { j, omega: 1.0 };
    let st = coherent_state(j, &Direction::new(1.1, 4.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..4 {
        let ti = rng.gen_range(0.0..3.0);
        let tj = ti + rng.gen_range(0.05..3.0);
        assert!(noninvasiveness_gap(&st, &evo, &hemi, ti, tj).unwrap() < 0.01);
    }
    assert!(noninvasiveness_gap(&st, &evo, &hemi, 1.0, 0.5).is_err());
    let mm = SpinState::maximally_mixed(sj(10.0));
    let g = noninvasiveness_gap(&mm, &RotationX { j: sj(10.0), omega: 1.0 }, &hemispheres(sj(10.0)), 0.4, 0.4).unwrap();
    assert!(g.abs() < 1e-9);

    // Undisturbed: the south pole. Measured at pi/4 and evolved on: an equal
    // mixture of both poles. The overlap is therefore 1/sqrt(2).
    let cat = cat_hamiltonian(j);
    let g = noninvasiveness_gap(&SpinState::basis(j, 100.0).unwrap(), &cat, &hemi, PI / 4.0, PI / 2.0).unwrap();
    assert!((g - (1.0 - 0.5f64.sqrt())).abs() < 1e-6, "{g}");
}

fn uniform_samples(n: usize, t: f64) -> Vec<(Direction, f64)> {
    (0..n)
        .map(|i| {
            let c = -1.0 + (2.0 * i as f64 + 1.0) / n as f64;
            (Direction::new(c.acos(), 0.7).unwrap(), t)
        })
        .collect()
}

#[test]
fn sufficient_condition_examples() {
    let j = sj(100.0);
    let part = make_partition(j, 40.0, PartitionMode::Aligned).unwrap();
    let povm = build_povm(&part);
    let rot = RotationX { j, omega: 1.0 };
    let (hi, lo) = part.cuts(0);
    let mid = Direction::new(((hi + lo) / 2.0 / 100.5).acos(), 0.0).unwrap();
    let r = sufficient_condition_check(&rot, &povm, &[(mid, 0.0)]).unwrap();
    assert!(r.max < 1e-2, "{}", r.max);
    let pole = sufficient_condition_check(&rot, &povm, &[(Direction::NORTH, 0.0)]).unwrap();
    assert!(pole.max < 1e-3, "{}", pole.max);
    let wide = make_partition(j, 80.0, PartitionMode::Aligned).unwrap();
    let (hi, lo) = wide.cuts(1);
    let inner = Direction::new(((hi + lo) / 2.0 / 100.5).acos(), 1.0).unwrap();
    let w = sufficient_condition_check(&rot, &build_povm(&wide), &[(inner, 0.0)]).unwrap();
    assert!(w.max < 1e-3, "{}", w.max);

    // Identity evolution: only the static slot membership matters.
    let still = RotationX { j, omega: 0.0 };
    let a = sufficient_condition_check(&still, &povm, &[(mid, 5.0)]).unwrap();
    assert!((a.max - r.max).abs() < 1e-12);

    // The rotation carries every state rigidly, so the border fraction of a
    // uniform sample does not depend on the time.
    let f0 = sufficient_condition_check(&rot, &povm, &uniform_samples(300, 0.0)).unwrap().border_fraction;
    let f1 = sufficient_condition_check(&rot, &povm, &uniform_samples(300, 0.9)).unwrap().border_fraction;
    assert!((f0 - f1).abs() < 0.05, "{f0} {f1}");
    assert!(f0 > 0.0 && f0 < 1.0);

    let hemi = hemispheres(j);
    let cat = cat_hamiltonian(j);
    let r = sufficient_condition_check(&cat, &hemi, &[(Direction::NORTH, PI / 4.0)]).unwrap();
    assert!((r.max - 0.5).abs() < 1e-9, "{}", r.max);
}

#[test]
fn border_fraction_scales_with_sqrt_j_over_delta_m() {
    // Fixed sqrt(j)/delta_m must give comparable border fractions; halving it
    // roughly halves the fraction.
    let frac = |jv: f64, dm: f64| {
        let j = sj(jv);
        let povm = build_povm(&make_partition(j, dm, PartitionMode::Aligned).unwrap());
        sufficient_condition_check(&RotationX { j, omega: 0.0 }, &povm, &uniform_samples(400, 0.0))
            .unwrap()
            .border_fraction
    };
    let a = frac(100.0, 40.0);
    let b = frac(400.0, 80.0);
    let c = frac(400.0, 160.0);
    assert!(a / b < 2.0 && b / a < 2.0, "{a} {b}");
    assert!(b / c > 1.0 && b / c < 4.0, "{b} {c}");
}

#[test]
fn characteristic_function_examples() {
    let j = sj(10_000.0);
    assert_eq!(quantum_char_fn(j, 0.0, 0.0, 1.0), 1.0);
    assert_eq!(classical_char_fn(j, 0.0, 0.0, 1.0), 1.0);
    assert!((classical_char_fn(j, 0.3, 0.3, PI) - 1.0).abs() < 1e-12);
    let x = 0.01 / j.j().sqrt();
    for th in [0.3, 1.0, 2.0] {
        assert!((quantum_char_fn(j, x, x, th) - classical_char_fn(j, x, x, th)).abs() < 1e-4);
    }
}

#[test]
fn classical_limit_improves_with_j() {
    let sup = |jv: f64| {
        let j = sj(jv);
        let c = 0.1 / jv.sqrt();
        (0..=200)
            .map(|i| {
                let th = PI * i as f64 / 200.0;
                (quantum_char_fn(j, c, c, th) - classical_char_fn(j, c, c, th)).abs()
            })
            .fold(0.0, f64::max)
    };
    let s = [sup(1e2), sup(1e3), sup(1e4)];
    assert!(s[0] > s[1] && s[1] > s[2], "{s:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn char_fn_matches_brute_force(which in 0usize..3, xi in -3.0..3.0f64, eta in -3.0..3.0f64, theta in 0.0..PI) {
        let j = sj([0.5, 1.5, 2.0][which]);
        let a = quantum_char_fn(j, xi, eta, theta);
        let b = char_fn_brute_force(j, xi, eta, theta);
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn povm_completeness_and_kraus(jt in 1u32..=800, choice in 0usize..3) {
        let j = SpinLength::from_twice(jt).unwrap();
        let r = j.j().sqrt();
        let dm = [2.0, r.ceil(), (4.0 * r).ceil()][choice].clamp(1.0, j.dim() as f64);
        let povm = build_povm(&make_partition(j, dm, PartitionMode::Aligned).unwrap());
        prop_assert!(povm.completeness_error() < 1e-10);
        prop_assert!(povm.kraus_error() < 1e-10);
        prop_assert!(povm.elements.iter().all(|e| e.iter().all(|&g| (0.0..=1.0).contains(&g))));
    }

    #[test]
    fn trace_and_q_paths_agree(jt in 1u32..24, dm in 1.0..6.0f64, seed in 0u64..1000) {
        let j = SpinLength::from_twice(jt).unwrap();
        let dm = dm.min(j.dim() as f64);
        let part = make_partition(j, dm, PartitionMode::Aligned).unwrap();
        let povm = build_povm(&part);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = SpinState::pure(j, random_ket(j, &mut rng)).unwrap();
        let tr = slot_probabilities(&st, &povm).unwrap();
        let q = slot_probabilities_from_q(&st, &part);
        for (x, y) in tr.iter().zip(&q) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn reduced_states_are_states(jt in 2u32..30, seed in 0u64..1000) {
        let j = SpinLength::from_twice(jt).unwrap();
        let povm = hemispheres(j);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_ket(j, &mut rng);
        let b = random_ket(j, &mut rng);
        let rho = (&a * a.adjoint() + &b * b.adjoint()) * C64::new(0.5, 0.0);
        let st = SpinState::mixed(j, rho).unwrap();
        for s in 0..2 {
            let r = reduce_state(&st, &povm, s).unwrap();
            prop_assert!((r.density().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
