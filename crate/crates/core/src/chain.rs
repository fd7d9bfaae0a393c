//! Collective entanglement in the ground state of a closed harmonic chain
//! `H = (E0/2) sum (p_j^2 + q_j^2 - alpha q_j q_{j+1})` and in its continuum
//! limit, the 1+1 dimensional Klein-Gordon field.
//!
//! Two blocks A and B are read out only through the collective operators
//! `Q = c sum q_j`, `P = c sum p_j`. The vacuum is Gaussian, so the four
//! numbers `G, H, G_AB, H_AB` fix the entanglement of the collective pair.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{gauss_legendre, gen_binomial, hyp2f1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainSize {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    pub alpha: f64,
    pub size: ChainSize,
}

impl ChainParams {
    pub fn infinite(alpha: f64) -> Result<Self> {
        Self::new(alpha, ChainSize::Infinite)
    }

    pub fn finite(alpha: f64, n: usize) -> Result<Self> {
        Self::new(alpha, ChainSize::Finite(n))
    }

    pub fn new(alpha: f64, size: ChainSize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("coupling alpha = {alpha} outside (0, 1)")));
        }
        if size == ChainSize::Finite(0) {
            return Err(Error::Parameter("empty chain".into()));
        }
        Ok(Self { alpha, size })
    }

    /// `nu(theta) = sqrt(1 - alpha cos theta)`.
    pub fn dispersion(&self, theta: f64) -> f64 {
        (1.0 - self.alpha * theta.cos()).sqrt()
    }
}

/// Vacuum correlations `g_l = <q_i q_{i+l}>` and `h_l = <p_i p_{i+l}>`.
pub fn two_point(params: &ChainParams, l: usize) -> Result<(f64, f64)> {
    match params.size {
        ChainSize::Finite(n) => {
            if 2 * l >= n {
                return Err(Error::Parameter(format!("distance l = {l} needs l < N/2 = {}", n as f64 / 2.0)));
            }
            let (mut g, mut h) = (0.0, 0.0);
            for k in 0..n {
                let theta = 2.0 * PI * k as f64 / n as f64;
                let nu = params.dispersion(theta);
                let c = (l as f64 * theta).cos();
                g += c / nu;
                h += c * nu;
            }
            Ok((g / (2 * n) as f64, h / (2 * n) as f64))
        }
        ChainSize::Infinite => {
            let a = params.alpha;
            // z = (1 - sqrt(1 - a^2)) / a without the cancellation at small a
            let z = a / (1.0 + (1.0 - a * a).sqrt());
            let mu = 1.0 / (1.0 + z * z).sqrt();
            let z2 = z * z;
            let lf = l as f64;
            let zl = z.powi(l as i32);
            let g = zl / (2.0 * mu) * gen_binomial(lf - 0.5, l as u32) * hypergeom_2f1(0.5, lf + 0.5, lf + 1.0, z2)?;
            let h = mu * zl / 2.0 * gen_binomial(lf - 1.5, l as u32) * hypergeom_2f1(-0.5, lf - 0.5, lf + 1.0, z2)?;
            Ok((g, h))
        }
    }
}

/// `(g_l, h_l)` for `l = 0..=max_l`.
pub fn two_point_table(params: &ChainParams, max_l: usize) -> Result<Vec<(f64, f64)>> {
    (0..=max_l).map(|l| two_point(params, l)).collect()
}

/// Gauss hypergeometric `2F1(a, b; c; x)` for `|x| < 1`.
pub fn hypergeom_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp2f1(a, b, c, x)
}

/// Two blocks of `n = m s` oscillators each, built from `m` subblocks of `s`
/// sites. Subblocks of A and B alternate with gaps of `d` sites:
///
/// ```text
///   A..A  d  B..B  d  A..A  d  B..B  ...
///   |s|      |s|
/// ```
///
/// A's first site is 0. The contiguous case is `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub s: usize,
    pub m: usize,
    pub d: usize,
}

impl BlockSpec {
    pub fn new(s: usize, m: usize, d: usize) -> Result<Self> {
        if s == 0 || m == 0 {
            return Err(Error::Parameter(format!("block needs s >= 1 and m >= 1, got s = {s}, m = {m}")));
        }
        Ok(Self { s, m, d })
    }

    pub fn contiguous(n: usize, d: usize) -> Result<Self> {
        Self::new(n, 1, d)
    }

    pub fn n(&self) -> usize {
        self.m * self.s
    }

    fn sites(&self, offset: usize) -> Vec<usize> {
        let period = 2 * (self.s + self.d);
        (0..self.m).flat_map(|k| (0..self.s).map(move |i| offset + k * period + i)).collect()
    }

    pub fn sites_a(&self) -> Vec<usize> {
        self.sites(0)
    }

    pub fn sites_b(&self) -> Vec<usize> {
        self.sites(self.s + self.d)
    }

    /// Largest site distance that enters the covariances.
    pub fn max_distance(&self) -> usize {
        let (a, b) = (self.sites_a(), self.sites_b());
        b[b.len() - 1] - a[0]
    }
}

/// Scale `c` of the collective operators `Q = c sum q_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Normalization {
    /// `c = 1/sqrt(n)`, canonical `[Q, P] = i`.
    #[default]
    Canonical,
    /// `c = 1`.
    Sum,
    /// `c = 1/n`.
    Mean,
}

impl Normalization {
    fn c2(self, n: usize) -> f64 {
        match self {
            Normalization::Canonical => 1.0 / n as f64,
            Normalization::Sum => 1.0,
            Normalization::Mean => 1.0 / (n * n) as f64,
        }
    }
}

/// Covariances of `(Q_A, P_A, Q_B, P_B)`. `commutator` is `|<[Q, P]>|`,
/// equal to 1 for canonical operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceBlock {
    pub g: f64,
    pub h: f64,
    pub g_ab: f64,
    pub h_ab: f64,
    pub commutator: f64,
}

impl CovarianceBlock {
    pub fn canonical(g: f64, h: f64, g_ab: f64, h_ab: f64) -> Self {
        Self { g, h, g_ab, h_ab, commutator: 1.0 }
    }
}

pub fn block_covariance(params: &ChainParams, spec: &BlockSpec) -> Result<CovarianceBlock> {
    block_covariance_with(params, spec, Normalization::Canonical)
}

pub fn block_covariance_with(params: &ChainParams, spec: &BlockSpec, norm: Normalization) -> Result<CovarianceBlock> {
    let table = two_point_table(params, spec.max_distance())?;
    let (a, b) = (spec.sites_a(), spec.sites_b());
    let sum = |x: &[usize], y: &[usize]| {
        let mut acc = (0.0, 0.0);
        for &i in x {
            for &j in y {
                let (g, h) = table[i.abs_diff(j)];
                acc.0 += g;
                acc.1 += h;
            }
        }
        acc
    };
    let (g, h) = sum(&a, &a);
    let (g_ab, h_ab) = sum(&a, &b);
    let n = spec.n();
    let c2 = norm.c2(n);
    Ok(CovarianceBlock { g: c2 * g, h: c2 * h, g_ab: c2 * g_ab, h_ab: c2 * h_ab, commutator: c2 * n as f64 })
}

/// Degree of entanglement `max(0, (c^2/4) / (d1 d2) - 1)` with
/// `d1 = G - |G_AB|`, `d2 = H - |H_AB|`.
pub fn epsilon(cov: &CovarianceBlock) -> Result<f64> {
    let d1 = cov.g - cov.g_ab.abs();
    let d2 = cov.h - cov.h_ab.abs();
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::Parameter(format!("not a physical covariance: d1 = {d1}, d2 = {d2}")));
    }
    let floor = 0.25 * cov.commutator * cov.commutator;
    Ok((floor / (d1 * d2) - 1.0).max(0.0))
}

/// Variance witness `<(Q_A - Q_B)^2> + <(P_A + P_B)^2>`; below 2 certifies
/// entanglement.
pub fn duan_witness(cov: &CovarianceBlock) -> f64 {
    2.0 * (cov.g - cov.g_ab + cov.h + cov.h_ab)
}

/// Nearest-neighbour estimate of `epsilon` for `m` touching subblocks
/// (`d = 0`) with `n` sites per block.
pub fn epsilon_periodic_approx(alpha: f64, n: usize, m: usize) -> Result<f64> {
    if m == 0 || n == 0 || n % m != 0 {
        return Err(Error::Parameter(format!("n = {n} is not a positive multiple of m = {m}")));
    }
    let params = ChainParams::infinite(alpha)?;
    let (g0, h0) = two_point(&params, 0)?;
    let (g1, h1) = two_point(&params, 1)?;
    let nf = n as f64;
    let gq = g0 + (2.0 - (4 * m - 1) as f64 / nf) * g1;
    let hq = h0 + (2.0 - 1.0 / nf) * h1;
    Ok(1.0 / (4.0 * gq * hq) - 1.0)
}

/// Row of a sweep over block geometries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainPoint {
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub d: usize,
    pub epsilon: f64,
    pub duan: f64,
}

pub fn chain_point(alpha: f64, spec: &BlockSpec) -> Result<ChainPoint> {
    let cov = block_covariance(&ChainParams::infinite(alpha)?, spec)?;
    Ok(ChainPoint {
        alpha,
        n: spec.n(),
        m: spec.m,
        s: spec.s,
        d: spec.d,
        epsilon: epsilon(&cov)?,
        duan: duan_witness(&cov),
    })
}

/// Default UV cutoff for the log-divergent momentum propagator, in units of
/// `2 pi / L`.
pub const DEFAULT_CUTOFF_PERIODS: f64 = 1.0e4;

const PANEL_NODES: usize = 24;
const MAX_TAIL_PANELS: usize = 4000;
const TAIL_TOL: f64 = 1e-13;

/// Collective field and momentum propagators of the Klein-Gordon vacuum for
/// two windows of length `l` whose centres are `r` apart:
/// `D(r) = (1/pi L) int dk k^-2 (k^2 + m^2)^(-+1/2) sin^2(kL/2) cos(kr)`.
///
/// `D_Pi` diverges logarithmically at `r = 0` and `r = L`; there the
/// non-oscillating part is cut at `k = DEFAULT_CUTOFF_PERIODS * 2 pi / L`.
pub fn field_propagators(mass: f64, l: f64, r: f64) -> Result<(f64, f64)> {
    field_propagators_with(mass, l, r, DEFAULT_CUTOFF_PERIODS * 2.0 * PI / l)
}

pub fn field_propagators_with(mass: f64, l: f64, r: f64, cutoff: f64) -> Result<(f64, f64)> {
    check_window(mass, l)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("distance r = {r} must be finite and >= 0")));
    }
    let phi = window_integral(mass, l, r, Power::Inverse, cutoff)?;
    let pi = window_integral(mass, l, r, Power::Direct, cutoff)?;
    Ok((phi, pi))
}

/// `|<[Phi_L, Pi_L]>|` for one window, `(2/pi L) int dk k^-2 sin^2(kL/2)`,
/// evaluated with the same quadrature as the propagators. Exactly 1.
pub fn window_commutator(l: f64) -> Result<f64> {
    check_window(1.0, l)?;
    Ok(2.0 * window_integral(1.0, l, 0.0, Power::Zero, f64::INFINITY)?)
}

/// Covariance of the field windows at distance `r`.
pub fn field_covariance(mass: f64, l: f64, r: f64) -> Result<CovarianceBlock> {
    let (g, h) = field_propagators(mass, l, 0.0)?;
    let (g_ab, h_ab) = field_propagators(mass, l, r)?;
    Ok(CovarianceBlock::canonical(g, h, g_ab, h_ab))
}

fn check_window(mass: f64, l: f64) -> Result<()> {
    if mass == 0.0 {
        return Err(Error::Divergent("massless field propagator is infrared divergent".into()));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::Parameter(format!("mass = {mass} must be positive")));
    }
    if !(l >= 1e-6 && l.is_finite()) {
        return Err(Error::Parameter(format!("window length L = {l} must be >= 1e-6")));
    }
    Ok(())
}

/// Exponent `p` of `omega_k = sqrt(k^2 + m^2)` in the integrand.
#[derive(Clone, Copy)]
enum Power {
    Inverse,
    Zero,
    Direct,
}

impl Power {
    fn weight(self, k: f64, mass: f64) -> f64 {
        match self {
            Power::Inverse => 1.0 / k.hypot(mass),
            Power::Zero => 1.0,
            Power::Direct => k.hypot(mass),
        }
    }
}

/// `(1/pi L) int_{-inf}^{inf} = (2/pi L) int_0^inf`. The integral is split at
/// `k0`: the head is done panel by panel; beyond `k0` the product
/// `sin^2(kL/2) cos(kr)` is expanded into pure cosines and each term is
/// integrated separately.
fn window_integral(mass: f64, l: f64, r: f64, p: Power, cutoff: f64) -> Result<f64> {
    let (x, w) = gauss_legendre(PANEL_NODES);
    let top = r + l;
    let width = (PI / top).min(mass.max(1e-3 / l)).min(PI / l);
    let k0 = (40.0 * PI / l).max(10.0 * mass);
    let panels = (k0 / width).ceil() as usize;
    let width = k0 / panels as f64;

    let f = |k: f64| {
        let s = if k == 0.0 { l / 2.0 } else { (0.5 * k * l).sin() / k };
        s * s * (k * r).cos() * p.weight(k, mass)
    };
    let mut head = 0.0;
    for i in 0..panels {
        let (a, b) = (i as f64 * width, (i + 1) as f64 * width);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        head += h * x.iter().zip(&w).map(|(&xi, &wi)| wi * f(c + h * xi)).sum::<f64>();
    }

    let d = (r - l).abs();
    let mut terms = vec![(0.5, r), (-0.25, d), (-0.25, r + l)];
    // merge equal frequencies so a divergent constant part is seen whole
    terms.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (c, a) in terms {
        match merged.last_mut() {
            Some(last) if (last.1 - a).abs() <= 1e-12 * top => last.0 += c,
            _ => merged.push((c, a)),
        }
    }
    let mut tail = 0.0;
    for (c, a) in merged {
        if c.abs() < 1e-15 {
            continue;
        }
        let v = if a <= 1e-12 * top {
            constant_tail(mass, k0, p, cutoff)?
        } else {
            oscillating_tail(mass, k0, a, p, &x, &w)?
        };
        tail += c * v;
    }
    Ok(2.0 / (PI * l) * (head + tail))
}

/// `int_{k0}^{cutoff} omega^p / k^2 dk`.
fn constant_tail(mass: f64, k0: f64, p: Power, cutoff: f64) -> Result<f64> {
    match p {
        Power::Inverse => {
            // (sqrt(k0^2 + m^2)/k0 - 1)/m^2, cancellation removed
            let u = mass / k0;
            Ok(1.0 / (k0 * k0 * ((1.0 + u * u).sqrt() + 1.0)))
        }
        Power::Zero => Ok(1.0 / k0),
        Power::Direct => {
            if !cutoff.is_finite() {
                return Err(Error::Divergent("momentum propagator at r = 0 or r = L needs a UV cutoff".into()));
            }
            if cutoff <= k0 {
                return Err(Error::Parameter(format!("UV cutoff {cutoff} must exceed {k0}")));
            }
            let prim = |k: f64| -k.hypot(mass) / k + (k / mass).asinh();
            Ok(prim(cutoff) - prim(k0))
        }
    }
}

/// `int_{k0}^inf omega^p cos(a k) / k^2 dk`, summed over half periods of the
/// cosine and accelerated with Wynn's epsilon algorithm.
fn oscillating_tail(mass: f64, k0: f64, a: f64, p: Power, x: &[f64], w: &[f64]) -> Result<f64> {
    let half = PI / a;
    let f = |k: f64| p.weight(k, mass) * (a * k).cos() / (k * k);
    let mut wynn = Wynn::default();
    let mut partial = 0.0;
    let mut last = f64::NAN;
    for i in 0..MAX_TAIL_PANELS {
        let (lo, hi) = (k0 + i as f64 * half, k0 + (i + 1) as f64 * half);
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        partial += h * x.iter().zip(w).map(|(&xi, &wi)| wi * f(c + h * xi)).sum::<f64>();
        let est = wynn.push(partial);
        if i >= 8 && (est - last).abs() <= TAIL_TOL * est.abs().max(1.0 / (k0 * k0)) {
            return Ok(est);
        }
        last = est;
    }
    Err(Error::Convergence(format!("oscillatory tail with frequency {a}")))
}

/// Wynn's epsilon algorithm on a stream of partial sums.
#[derive(Default)]
struct Wynn {
    diag: Vec<f64>,
}

impl Wynn {
    fn push(&mut self, s: f64) -> f64 {
        let mut prev = 0.0;
        let mut cur = s;
        for k in 0..self.diag.len() {
            let diff = cur - self.diag[k];
            let next = if diff.abs() < 1e-300 { f64::INFINITY } else { prev + 1.0 / diff };
            prev = self.diag[k];
            self.diag[k] = cur;
            cur = next;
            if !cur.is_finite() {
                self.diag.truncate(k + 1);
                break;
            }
        }
        if cur.is_finite() {
            self.diag.push(cur);
        }
        let top = self.diag.len() - 1;
        self.diag[top - top % 2]
    }
}
