use std::f64::consts::PI;

use macrolab_core::lg::*;
use macrolab_core::spin::{build_spin_operators, coherent_state, parity_operator};
use macrolab_core::{Direction, Hamiltonian, Ket, Operator, RotationX, SpinLength, SpinState, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sj(j: f64) -> SpinLength {
    SpinLength::new(j).unwrap()
}

fn sigma_z_obs() -> DichotomicObservable {
    let jz = build_spin_operators(sj(0.5)).jz;
    DichotomicObservable::from_involution(&(jz * C64::new(2.0, 0.0))).unwrap()
}

fn parity_setup(j: SpinLength) -> (SpinState, RotationX, DichotomicObservable) {
    (
        SpinState::maximally_mixed(j),
        RotationX { j, omega: 1.0 },
        DichotomicObservable::from_involution(&parity_operator(j)).unwrap(),
    )
}

#[test]
fn equal_times_give_unit_correlation() {
    let j = sj(3.0);
    let st = coherent_state(j, &Direction::new(1.0, 2.0).unwrap());
    let (_, evo, obs) = parity_setup(j);
    let c = two_time_correlation(&st, &evo, &obs, 0.7, 0.7).unwrap();
    assert!((c - 1.0).abs() < 1e-12);
    assert!(two_time_correlation(&st, &evo, &obs, 1.0, 0.5).is_err());
}

#[test]
fn spin_half_precession_correlation() {
    let j = sj(0.5);
    let evo = RotationX { j, omega: 1.3 };
    let obs = sigma_z_obs();
    for (ti, tj, dir) in [(0.0, 0.4, (0.3, 0.1)), (0.2, 2.9, (2.0, 4.0)), (1.0, 7.5, (0.0, 0.0))] {
        let st = coherent_state(j, &Direction::new(dir.0, dir.1).unwrap());
        let c = two_time_correlation(&st, &evo, &obs, ti, tj).unwrap();
        assert!((c - (1.3 * (tj - ti)).cos()).abs() < 1e-12);
    }
}

#[test]
fn spin_half_maximum() {
    let omega = 2.0;
    let dt = PI / (4.0 * omega);
    assert!((chsh_spin_half(omega * dt) - 2.0 * 2f64.sqrt()).abs() < 1e-10);
    let j = sj(0.5);
    let evo = RotationX { j, omega };
    let obs = sigma_z_obs();
    let st = SpinState::maximally_mixed(j);
    let r = lg_chsh(|a, b| two_time_correlation(&st, &evo, &obs, a, b), [0.0, dt, 2.0 * dt, 3.0 * dt]).unwrap();
    assert!((r.k - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!(r.violated && r.bound == 2.0);
    let sum = r.correlations[0] + r.correlations[1] + r.correlations[2] - r.correlations[3];
    assert!((sum - r.k).abs() < 1e-12);
}

#[test]
fn parity_matrix_matches_analytic_j5() {
    let j = sj(5.0);
    let (st, evo, obs) = parity_setup(j);
    for wdt in [0.01, 0.3, 1.054 / 11.0, 2.2] {
        let c = two_time_correlation(&st, &evo, &obs, 0.5, 0.5 + wdt).unwrap();
        assert!((c - analytic_parity_correlation(j, wdt)).abs() < 1e-10);
    }
    let x = 1.054 / 21.0;
    let j = sj(10.0);
    let (st, evo, obs) = parity_setup(j);
    let c = two_time_correlation(&st, &evo, &obs, 0.0, x).unwrap();
    assert!((c - analytic_parity_correlation(j, x)).abs() < 1e-10);
}

#[test]
fn parity_correlation_limits() {
    let j = sj(7.5);
    assert!((analytic_parity_correlation(j, 0.0) - 1.0).abs() < 1e-15);
    for x in [0.1, 1.0, 2.5] {
        assert!((analytic_parity_correlation(sj(0.5), x) - x.cos()).abs() < 1e-14);
    }
    // The Taylor branch joins the ratio continuously around multiples of pi.
    for j in [sj(3.0), sj(3.5)] {
        for k in [0.0, 1.0, 2.0] {
            for d in [2e-8, -3e-8] {
                let x = k * PI + d;
                let direct = (j.dim() as f64 * x).sin() / (j.dim() as f64 * x.sin());
                let v = analytic_parity_correlation(j, x);
                assert!((v - direct).abs() < 1e-6, "{} {k} {d}: {v} vs {direct}", j.j());
                assert!(v.abs() <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn analytic_k_extremes() {
    let (xmax, kmax, cross) = analytic_k_parity_extremes().unwrap();
    assert!((xmax - 1.054).abs() < 0.005, "{xmax}");
    assert!((kmax - 2.481).abs() < 0.005, "{kmax}");
    assert!((cross - 1.656).abs() < 0.01, "{cross}");
    assert!((analytic_k_parity(1e-7) - 2.0).abs() < 1e-12);
    assert!((analytic_k_parity(1.656) - 2.0).abs() < 2e-3);
}

#[test]
fn violation_scaling_matrix_path() {
    for j in [10.0, 50.0, 200.0] {
        let k = parity_pipeline_k(sj(j), 1.054).unwrap();
        assert!((k - 2.481).abs() < 0.02, "j={j} K={k}");
    }
}

#[test]
fn wigner_type_two_level() {
    assert!((wigner_two_level(PI / 3.0) - 1.5).abs() < 1e-12);
    assert!((wigner_two_level(PI / 2.0) - 1.0).abs() < 1e-12);
    let x = PI / 3.0;
    let p1 = (x / 2.0).cos().powi(2);
    let p2 = x.cos().powi(2);
    assert!((lg_wigner_survival(p1, p2, 0.0).unwrap() - 1.5).abs() < 1e-12);
    assert!(lg_wigner_survival(1.2, 0.5, 0.0).is_err());
}

fn wigner_pipeline(h: &Operator, psi0: &Ket, dt: f64) -> (f64, f64) {
    let dim = psi0.len();
    let j = SpinLength::from_twice(dim as u32 - 1).unwrap();
    let ham = Hamiltonian::new(h).unwrap();
    let obs = DichotomicObservable::survival(psi0).unwrap();
    let st = SpinState::pure(j, psi0.clone()).unwrap();
    let r = lg_wigner(|a, b| two_time_correlation(&st, &ham, &obs, a, b), [0.0, dt, 2.0 * dt]).unwrap();
    use macrolab_core::Evolution;
    let a1 = psi0.dotc(&(ham.propagator(dt) * psi0));
    let a2 = psi0.dotc(&(ham.propagator(2.0 * dt) * psi0));
    (r.k, lg_wigner_from_amplitudes(a1, a2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn parity_oracle_equivalence(which in 0usize..4, wdt in 0.0..3.0f64) {
        let j = sj([0.5, 1.0, 5.0, 20.0][which]);
        let (st, evo, obs) = parity_setup(j);
        let c = two_time_correlation(&st, &evo, &obs, 0.0, wdt).unwrap();
        prop_assert!((c - analytic_parity_correlation(j, wdt)).abs() < 1e-9);
    }

    #[test]
    fn two_level_pipeline(e1 in -2.0..2.0f64, de in 0.2..3.0f64, dt in 0.01..4.0f64) {
        let h = Operator::from_diagonal(&Ket::from_vec(vec![C64::new(e1, 0.0), C64::new(e1 + de, 0.0), C64::new(e1 - 5.0, 0.0)]));
        let s = 0.5f64.sqrt();
        let psi0 = Ket::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)]);
        let (k, from_amp) = wigner_pipeline(&h, &psi0, dt);
        prop_assert!((k - wigner_two_level(de * dt)).abs() < 1e-10);
        prop_assert!((from_amp - k).abs() < 1e-10);
    }

    #[test]
    fn survival_formula_general(seed in 0.1..5.0f64, dt in 0.05..2.0f64) {
        let d = 4;
        let mut h = Operator::from_fn(d, d, |a, b| C64::new((seed * (a + 2 * b) as f64).sin(), (seed * (a * b) as f64 + 0.3).cos()));
        h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let psi0 = Ket::from_fn(d, |a, _| C64::new((seed + a as f64).cos(), (seed * a as f64).sin()));
        let psi0 = psi0.unscale(psi0.norm());
        let (k, from_amp) = wigner_pipeline(&h, &psi0, dt);
        prop_assert!((k - from_amp).abs() < 1e-10);
    }

    #[test]
    fn classical_rotor_never_violates(omega in 0.1..5.0f64, dt in 0.001..10.0f64, t0 in 0.0..3.0f64) {
        let t = [t0, t0 + dt, t0 + 2.0 * dt, t0 + 3.0 * dt];
        let r = lg_chsh(|a, b| Ok(classical_spin_correlation_oracle(omega, a, b)), t).unwrap();
        prop_assert!(r.k <= 2.0 + 1e-12);
    }
}

#[test]
fn macrorealistic_bound_by_enumeration() {
    let all = macrorealistic_k_values();
    assert_eq!(all.len(), 16);
    assert!(all.iter().all(|(_, k)| k.abs() == 2.0));
    let r = lg_chsh(|_, _| Ok(1.0), [0.0, 1.0, 2.0, 3.0]).unwrap();
    assert_eq!(r.k, 2.0);
    assert!(!r.violated);
    assert_eq!(classical_spin_correlation_oracle(1.0, 0.3, 0.3), 1.0);
}

#[test]
fn classical_ensemble_matches_closed_form() {
    let j = sj(10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (xi, eta, theta) in [(0.05, 0.08, 0.7), (0.2, 0.1, 2.0)] {
        let (m, se) = classical_ensemble_char_fn(j, xi, eta, theta, 1_000_000, &mut rng);
        let k = (xi * xi + eta * eta + 2.0 * xi * eta * f64::cos(theta)).sqrt();
        let arg = (2.0 * j.j() + 1.0) * k / 2.0;
        let exact = arg.sin() / arg;
        assert!((m - exact).abs() < 3.0 * se + 1e-12, "{m} vs {exact} (se {se})");
    }
}

#[test]
fn sampled_correlation_is_seeded() {
    let j = sj(0.5);
    let evo = RotationX { j, omega: 1.0 };
    let obs = sigma_z_obs();
    let st = SpinState::maximally_mixed(j);
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sampled_correlation(&st, &evo, &obs, 0.0, 0.6, 20_000, &mut rng).unwrap()
    };
    assert_eq!(run(3), run(3));
    assert!((run(3) - 0.6f64.cos()).abs() < 4.0 * (1.0 / 20_000f64).sqrt());
}
