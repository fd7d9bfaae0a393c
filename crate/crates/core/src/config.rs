//! Numerical tolerances shared by every module.
//!
//! One record holds all of them so that a caller (typically the CLI) can
//! override any single value without touching the algorithms.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity of operators and purity/trace of states.
    pub hermitian: f64,
    /// Unitarity `U^dag U = 1`.
    pub unitary: f64,
    /// Eigenvalues of a density matrix may dip this far below zero.
    pub psd: f64,
    /// Normalization of densities on the sphere.
    pub quadrature: f64,
    /// Fidelity defect allowed for coherent-state covariance.
    pub fidelity: f64,
    /// Values of |sin(omega dt)| below this switch the parity correlation
    /// to its Taylor expansion.
    pub taylor_switch: f64,
    /// Relative accuracy requested from adaptive 1D quadrature.
    pub integral_rel: f64,
    /// Threshold under which a symmetric-logarithmic quantity counts as zero.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            unitary: 1e-10,
            psd: 1e-10,
            quadrature: 1e-6,
            fidelity: 1e-8,
            taylor_switch: 1e-8,
            integral_rel: 1e-10,
            zero: 1e-12,
        }
    }
}
