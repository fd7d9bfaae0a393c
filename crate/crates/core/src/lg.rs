//! Leggett-Garg inequalities.
//!
//! Two-time correlations are computed from exact branch probabilities with the
//! Lüders rule at the earlier time. Two forms of the inequality are provided:
//! the four-time `K = C12 + C23 + C34 - C14 <= 2` and the three-time
//! `K = C12 + C23 - C13 <= 1`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{bisect, scan_and_refine_max};
use crate::spin::{is_hermitian, Evolution, Ket, Operator, SpinLength, SpinState};
use crate::C64;

/// A two-outcome observable `A = P_+ - P_-`.
#[derive(Debug, Clone)]
pub struct DichotomicObservable {
    pub plus: Operator,
    pub minus: Operator,
}

impl DichotomicObservable {
    pub fn from_projector(plus: Operator) -> Result<Self> {
        let d = plus.nrows();
        let minus = Operator::identity(d, d) - &plus;
        let obs = Self { plus, minus };
        obs.validate(1e-10)?;
        Ok(obs)
    }

    /// From an involution `A` with `A^2 = 1`: `P_+- = (1 +- A) / 2`.
    pub fn from_involution(a: &Operator) -> Result<Self> {
        let d = a.nrows();
        let id = Operator::identity(d, d);
        let half = C64::new(0.5, 0.0);
        let obs = Self { plus: (&id + a) * half, minus: (&id - a) * half };
        obs.validate(1e-10)?;
        Ok(obs)
    }

    /// The projector onto `|psi0>` against its complement.
    pub fn survival(psi0: &Ket) -> Result<Self> {
        Self::from_projector(psi0 * psi0.adjoint())
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.plus.nrows();
        let small = |m: Operator| m.iter().all(|z| z.norm() <= tol);
        let ok = is_hermitian(&self.plus, tol)
            && is_hermitian(&self.minus, tol)
            && small(&self.plus * &self.plus - &self.plus)
            && small(&self.minus * &self.minus - &self.minus)
            && small(&self.plus * &self.minus)
            && small(&self.plus + &self.minus - Operator::identity(d, d));
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter("projectors are not a complete orthogonal pair".into()))
        }
    }

    pub fn operator(&self) -> Operator {
        &self.plus - &self.minus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LgResult {
    pub correlations: Vec<f64>,
    pub k: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Joint probabilities `P(k at ti, l at tj)` for `k, l` in `{+, -}`,
/// returned as `[[p++, p+-], [p-+, p--]]`.
pub fn joint_probabilities(
    rho0: &SpinState,
    evo: &dyn Evolution,
    obs: &DichotomicObservable,
    ti: f64,
    tj: f64,
) -> Result<[[f64; 2]; 2]> {
    if ti > tj {
        return Err(Error::Parameter(format!("times out of order: {ti} > {tj}")));
    }
    if evo.dim() != rho0.j.dim() || obs.plus.nrows() != evo.dim() {
        return Err(Error::Dimension { expected: rho0.j.dim(), got: evo.dim() });
    }
    let rho_i = if ti == 0.0 { rho0.density() } else { rho0.evolve(&evo.propagator(ti)).density() };
    // Heisenberg picture for the later measurement: Tr[P_l U B U^dag] = Tr[W_l B]
    // with W_l = U^dag P_l U, and W_- = 1 - W_+.
    let u = evo.propagator(tj - ti);
    let w_plus = u.adjoint() * &obs.plus * &u;
    let d = rho_i.nrows();
    let tr_prod = |a: &Operator, b: &Operator| -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for c in 0..d {
            for r in 0..d {
                s += a[(r, c)] * b[(c, r)];
            }
        }
        s.re
    };
    let mut out = [[0.0; 2]; 2];
    for (a, pk) in [&obs.plus, &obs.minus].into_iter().enumerate() {
        // Unnormalized Lüders branch, so a zero-probability outcome simply
        // contributes nothing.
        let branch = match diagonal_mask(pk) {
            Some(mask) => Operator::from_fn(d, d, |r, c| rho_i[(r, c)] * (mask[r] * mask[c])),
            None => pk * &rho_i * pk,
        };
        let total = branch.trace().re;
        let plus = tr_prod(&w_plus, &branch);
        out[a] = [plus.max(0.0), (total - plus).max(0.0)];
    }
    Ok(out)
}

/// Diagonal of a projector that has no off-diagonal entries.
fn diagonal_mask(p: &Operator) -> Option<Vec<f64>> {
    let d = p.nrows();
    for c in 0..d {
        for r in 0..d {
            if r != c && p[(r, c)] != C64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some((0..d).map(|i| p[(i, i)].re).collect())
}

/// `C_ij = sum_{k,l} k l p_{ik} q_{jl|ik}`.
pub fn two_time_correlation(
    rho0: &SpinState,
    evo: &dyn Evolution,
    obs: &DichotomicObservable,
    ti: f64,
    tj: f64,
) -> Result<f64> {
    let p = joint_probabilities(rho0, evo, obs, ti, tj)?;
    Ok(p[0][0] + p[1][1] - p[0][1] - p[1][0])
}

/// Seeded sampling estimate of [`two_time_correlation`] from `shots` runs.
pub fn sampled_correlation<R: Rng>(
    rho0: &SpinState,
    evo: &dyn Evolution,
    obs: &DichotomicObservable,
    ti: f64,
    tj: f64,
    shots: usize,
    rng: &mut R,
) -> Result<f64> {
    let p = joint_probabilities(rho0, evo, obs, ti, tj)?;
    let cum = [p[0][0], p[0][0] + p[0][1], p[0][0] + p[0][1] + p[1][0]];
    let total = cum[2] + p[1][1];
    let mut acc = 0i64;
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        acc += if u < cum[0] || u >= cum[2] { 1 } else { -1 };
    }
    Ok(acc as f64 / shots as f64)
}

fn check_increasing(t: &[f64]) -> Result<()> {
    if t.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("times must be strictly increasing: {t:?}")))
    }
}

/// Four-time inequality `K = C12 + C23 + C34 - C14 <= 2`.
pub fn lg_chsh<F: FnMut(f64, f64) -> Result<f64>>(mut corr: F, t: [f64; 4]) -> Result<LgResult> {
    check_increasing(&t)?;
    let c = vec![corr(t[0], t[1])?, corr(t[1], t[2])?, corr(t[2], t[3])?, corr(t[0], t[3])?];
    let k = c[0] + c[1] + c[2] - c[3];
    Ok(LgResult { correlations: c, k, bound: 2.0, violated: k > 2.0 })
}

/// Three-time inequality `K = C12 + C23 - C13 <= 1`.
pub fn lg_wigner<F: FnMut(f64, f64) -> Result<f64>>(mut corr: F, t: [f64; 3]) -> Result<LgResult> {
    check_increasing(&t)?;
    let c = vec![corr(t[0], t[1])?, corr(t[1], t[2])?, corr(t[0], t[2])?];
    let k = c[0] + c[1] - c[2];
    Ok(LgResult { correlations: c, k, bound: 1.0, violated: k > 1.0 })
}

/// `sin((2j+1) x) / ((2j+1) sin x)`, the parity correlation of the maximally
/// mixed state after a precession angle `x = omega dt`.
pub fn analytic_parity_correlation(j: SpinLength, omega_dt: f64) -> f64 {
    parity_correlation_with(j, omega_dt, 1e-8)
}

pub fn parity_correlation_with(j: SpinLength, x: f64, switch: f64) -> f64 {
    let n = j.dim() as f64;
    let s = x.sin();
    if s.abs() >= switch {
        // Rounding in sin near multiples of pi can push the ratio a hair past 1.
        return ((n * x).sin() / (n * s)).clamp(-1.0, 1.0);
    }
    let k = (x / std::f64::consts::PI).round();
    let delta = x - k * std::f64::consts::PI;
    // sin(N(k pi + d)) / sin(k pi + d) = (-1)^{k (N-1)} sin(N d) / sin d
    let sign = if (k as i64 * j.twice() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let n2 = n * n;
    let d2 = delta * delta;
    sign * (1.0 - (n2 - 1.0) * d2 / 6.0 + (n2 - 1.0) * (3.0 * n2 - 7.0) * d2 * d2 / 360.0)
}

/// `K(x) = 3 sin x / x - sin 3x / (3x)`, the large-spin parity violation for
/// four equidistant times with `x = (2j+1) omega dt`.
pub fn analytic_k_parity(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // 3 (1 - x^2/6) - (1 - 9 x^2 / 6) = 2 + x^2
        return 2.0 + x * x;
    }
    3.0 * x.sin() / x - (3.0 * x).sin() / (3.0 * x)
}

/// Location and value of the maximum of [`analytic_k_parity`], and the
/// point where it falls back to the macrorealistic bound 2.
pub fn analytic_k_parity_extremes() -> Result<(f64, f64, f64)> {
    let (xmax, kmax) = scan_and_refine_max(analytic_k_parity, 0.05, 3.0, 1000);
    let cross = bisect(|x| analytic_k_parity(x) - 2.0, xmax, 3.0)?;
    Ok((xmax, kmax, cross))
}

/// Finite-j parity `K` for four equidistant times separated by `omega dt`.
pub fn k_parity_exact(j: SpinLength, omega_dt: f64) -> f64 {
    3.0 * analytic_parity_correlation(j, omega_dt) - analytic_parity_correlation(j, 3.0 * omega_dt)
}

/// `K = 4 p(dt) sqrt(p(2dt)) cos(gamma) - 4 p(2dt) + 1` from survival
/// probabilities and the phase combination `gamma = 2 alpha - beta`.
pub fn lg_wigner_survival(p1: f64, p2: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(Error::Parameter(format!("survival probabilities outside [0, 1]: {p1}, {p2}")));
    }
    Ok(4.0 * p1 * p2.sqrt() * gamma.cos() - 4.0 * p2 + 1.0)
}

/// [`lg_wigner_survival`] from the amplitudes `<psi0|psi(dt)>` and
/// `<psi0|psi(2dt)>`.
pub fn lg_wigner_from_amplitudes(a1: C64, a2: C64) -> Result<f64> {
    let gamma = 2.0 * a1.arg() - a2.arg();
    lg_wigner_survival(a1.norm_sqr().min(1.0), a2.norm_sqr().min(1.0), gamma)
}

/// Two-level closed form `2 cos(dE dt) - cos(2 dE dt)`.
pub fn wigner_two_level(de_dt: f64) -> f64 {
    2.0 * de_dt.cos() - (2.0 * de_dt).cos()
}

/// Spin-1/2 closed form `3 cos(w dt) - cos(3 w dt)`.
pub fn chsh_spin_half(omega_dt: f64) -> f64 {
    3.0 * omega_dt.cos() - (3.0 * omega_dt).cos()
}

fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// A classical vector precessing about x, pointing along z at `t = 0`, read
/// out as `A(t) = sgn(cos omega t)`. The product of two predetermined values.
pub fn classical_spin_correlation_oracle(omega: f64, ti: f64, tj: f64) -> f64 {
    sgn((omega * ti).cos()) * sgn((omega * tj).cos())
}

/// Monte-Carlo estimate of the characteristic function
/// `E[exp(i (xi m1 + eta m2))]` of an isotropic ensemble of classical spins of
/// length `j + 1/2`, where `m1` and `m2` are the z components before and after
/// a rotation by `theta` about x. Returns the real part and its standard error.
pub fn classical_ensemble_char_fn<R: Rng>(
    j: SpinLength,
    xi: f64,
    eta: f64,
    theta: f64,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let len = j.j() + 0.5;
    let (st, ct) = theta.sin_cos();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = (1.0 - z * z).max(0.0).sqrt() * ph.sin();
        let m1 = len * z;
        let m2 = len * (y * st + z * ct);
        let v = (xi * m1 + eta * m2).cos();
        s += v;
        s2 += v * v;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Every assignment of predetermined values `A_i = +-1` at four times, with
/// its `K`. Any macrorealistic correlation is a convex mixture of these.
pub fn macrorealistic_k_values() -> Vec<([i8; 4], f64)> {
    (0..16u8)
        .map(|bits| {
            let a: [i8; 4] = std::array::from_fn(|i| if bits >> i & 1 == 1 { 1 } else { -1 });
            let f = |x: usize, y: usize| (a[x] * a[y]) as f64;
            (a, f(0, 1) + f(1, 2) + f(2, 3) - f(0, 3))
        })
        .collect()
}

/// Four-time parity `K` through the projective pipeline on the maximally
/// mixed state, at equidistant times with `x = (2j+1) omega dt`.
pub fn parity_pipeline_k(j: SpinLength, x: f64) -> Result<f64> {
    let omega_dt = x / j.dim() as f64;
    let evo = crate::spin::RotationX { j, omega: 1.0 };
    let obs = DichotomicObservable::from_involution(&crate::spin::parity_operator(j))?;
    let rho = SpinState::maximally_mixed(j);
    let t = [0.0, omega_dt, 2.0 * omega_dt, 3.0 * omega_dt];
    Ok(lg_chsh(|a, b| two_time_correlation(&rho, &evo, &obs, a, b), t)?.k)
}
