//! Special functions: factorial tables, Wigner 3j symbols, Gauss-Legendre
//! nodes, the Gauss hypergeometric series, spherical harmonics and the
//! regularized incomplete beta function.
//!
//! Half-integer arguments are passed as twice their value (`tj = 2j`), so
//! that all selection rules reduce to integer arithmetic.

use num_complex::Complex64 as C64;
use statrs::function::{beta, factorial};

use crate::error::{Error, Result};

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    factorial::ln_factorial(n)
}

/// `ln C(n, k)`; `-inf` outside `0 <= k <= n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    factorial::ln_binomial(n, k)
}

/// Generalized binomial coefficient `C(x, k) = x (x-1) ... (x-k+1) / k!`
/// for real `x` and integer `k >= 0`.
pub fn gen_binomial(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i as f64 + 1.0))
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    beta::beta_reg(a, b, x)
}

/// Convert a float that should be a half-integer into its doubled integer.
pub fn twice(x: f64) -> Result<i64> {
    let t = 2.0 * x;
    let r = t.round();
    if !x.is_finite() || (t - r).abs() > 1e-9 {
        return Err(Error::NotHalfInteger(x));
    }
    Ok(r as i64)
}

fn half(x: i64) -> Option<u64> {
    if x < 0 || x % 2 != 0 {
        None
    } else {
        Some((x / 2) as u64)
    }
}

/// Wigner 3j symbol with all six arguments doubled.
///
/// Returns zero whenever a selection rule (parity of `j +- m`, `|m| <= j`,
/// `m1 + m2 + m3 = 0`, triangle) is violated.
pub fn wigner_3j_twice(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, tm3: i64) -> f64 {
    if tm1 + tm2 + tm3 != 0 || tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    let facs = [
        tj1 + tm1, tj1 - tm1, tj2 + tm2, tj2 - tm2, tj3 + tm3, tj3 - tm3,
    ];
    let mut lf = [0u64; 6];
    for (slot, &f) in lf.iter_mut().zip(facs.iter()) {
        match half(f) {
            Some(v) => *slot = v,
            None => return 0.0,
        }
    }
    let tri = [tj1 + tj2 - tj3, tj1 - tj2 + tj3, -tj1 + tj2 + tj3];
    let mut lt = [0u64; 3];
    for (slot, &t) in lt.iter_mut().zip(tri.iter()) {
        match half(t) {
            Some(v) => *slot = v,
            None => return 0.0,
        }
    }
    let total = match half(tj1 + tj2 + tj3) {
        Some(v) => v,
        None => return 0.0,
    };

    let ln_delta = lt.iter().map(|&t| ln_factorial(t)).sum::<f64>() - ln_factorial(total + 1);
    let ln_pref = 0.5 * (ln_delta + lf.iter().map(|&f| ln_factorial(f)).sum::<f64>());

    // Racah sum over k; all quantities below are integers (not doubled).
    let a1 = (tj3 - tj2 + tm1) / 2;
    let a2 = (tj3 - tj1 - tm2) / 2;
    let b1 = (tj1 + tj2 - tj3) / 2;
    let b2 = (tj1 - tm1) / 2;
    let b3 = (tj2 + tm2) / 2;
    let kmin = 0.max(-a1).max(-a2);
    let kmax = b1.min(b2).min(b3);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let ln_den = ln_factorial(k as u64)
            + ln_factorial((a1 + k) as u64)
            + ln_factorial((a2 + k) as u64)
            + ln_factorial((b1 - k) as u64)
            + ln_factorial((b2 - k) as u64)
            + ln_factorial((b3 - k) as u64);
        let term = (ln_pref - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    let phase = (tj1 - tj2 - tm3) / 2;
    if phase.rem_euclid(2) == 0 {
        sum
    } else {
        -sum
    }
}

/// Wigner 3j symbol for half-integer float arguments.
pub fn wigner_3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    Ok(wigner_3j_twice(
        twice(j1)?,
        twice(j2)?,
        twice(j3)?,
        twice(m1)?,
        twice(m2)?,
        twice(m3)?,
    ))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` by its power series,
/// valid for `|z| < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::Parameter(format!("2F1 series needs |z| < 1, got {z}")));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Divergent(format!("2F1 with c = {c}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..100_000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("2F1({a}, {b}; {c}; {z})")))
}

/// Orthonormal spherical harmonic `Y_lm(theta, phi)` with the
/// Condon-Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> C64 {
    let am = m.unsigned_abs();
    if am > l {
        return C64::new(0.0, 0.0);
    }
    let p = assoc_legendre_normalized(l, am, theta.cos());
    let y = C64::from_polar(p, am as f64 * phi);
    if m < 0 {
        let s = if am % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * s
    } else {
        y
    }
}

/// `sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x)` for `m >= 0`, including the
/// Condon-Shortley phase.
pub fn assoc_legendre_normalized(l: u32, m: u32, x: f64) -> f64 {
    let s2 = (1.0 - x * x).max(0.0);
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for i in 1..=m {
        let fi = i as f64;
        pmm *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * s2.sqrt();
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut p_prev = pmm;
    let mut p = x * (2.0 * mf + 3.0).sqrt() * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}

/// Maximize a smooth function on `[a, b]`: coarse scan over `n` points, then
/// golden-section refinement around the best sample. Returns `(x, f(x))`.
pub fn scan_and_refine_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    let h = (b - a) / (n - 1) as f64;
    let (mut best, mut fbest) = (a, f(a));
    for i in 1..n {
        let x = a + h * i as f64;
        let fx = f(x);
        if fx > fbest {
            best = x;
            fbest = fx;
        }
    }
    let (mut lo, mut hi) = ((best - h).max(a), (best + h).min(b));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 * (1.0 + best.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    if fx >= fbest {
        (x, fx)
    } else {
        (best, fbest)
    }
}

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa * fb > 0.0 {
        return Err(Error::Parameter(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) < 1e-14 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn three_j_known_values() {
        let v = wigner_3j(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!((v + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        let v = wigner_3j(0.5, 0.5, 1.0, 0.5, -0.5, 0.0).unwrap();
        assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-14);
        assert_eq!(wigner_3j(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(wigner_3j(1.0, 0.3, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hyp2f1_elementary() {
        // 2F1(1, 1; 2; z) = -ln(1-z)/z
        let z = 0.7;
        let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
        assert!((v + (1.0 - z as f64).ln() / z).abs() < 1e-13);
    }

    #[test]
    fn harmonics_orthonormal() {
        let (x, w) = gauss_legendre(20);
        let nphi = 40;
        let mut s = C64::new(0.0, 0.0);
        let mut n = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            for p in 0..nphi {
                let phi = 2.0 * PI * p as f64 / nphi as f64;
                let th = xi.acos();
                let a = spherical_harmonic(5, -3, th, phi);
                let b = spherical_harmonic(4, -3, th, phi);
                let dw = wi * 2.0 * PI / nphi as f64;
                s += a.conj() * b * dw;
                n += a.norm_sqr() * dw;
            }
        }
        assert!(s.norm() < 1e-13);
        assert!((n - 1.0).abs() < 1e-13);
    }
}
