//! Four-term cosine-sum windows with analytic derivatives.
//!
//! The window is sampled on `n in [0, len)` as
//! `w(n) = sum_k (-1)^k a_k cos(2 pi k n / len)`, which puts the peak at
//! `n = len / 2` and zeros at both ends when `a_0 - a_1 + a_2 - a_3 = 0`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Nuttall's 4-term window with continuous first derivative.
pub const NUTTALL_C1: [f64; 4] = [0.355768, 0.487396, 0.144232, 0.012604];

const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSumWindow {
    pub coeffs: [f64; 4],
    pub len: usize,
}

impl CosineSumWindow {
    /// Builds a window after checking unit peak and vanishing endpoints.
    pub fn new(coeffs: [f64; 4], len: usize) -> Result<Self> {
        if len < 4 {
            return invalid(format!("window length must be at least 4, got {len}"));
        }
        let sum: f64 = coeffs.iter().sum();
        let alt = coeffs[0] - coeffs[1] + coeffs[2] - coeffs[3];
        if (sum - 1.0).abs() > COEFF_TOL {
            return invalid(format!("window coefficients sum to {sum}, expected 1"));
        }
        if alt.abs() > COEFF_TOL {
            return invalid(format!("window endpoint value {alt} is not zero"));
        }
        Ok(Self { coeffs, len })
    }

    pub fn nuttall(len: usize) -> Result<Self> {
        Self::new(NUTTALL_C1, len)
    }

    /// Window at a continuous position `n` (samples).
    pub fn value_at(&self, n: f64) -> f64 {
        let x = TAU * n / self.len as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| sign(k) * a * (k as f64 * x).cos())
            .sum()
    }

    /// dw/dn at a continuous position `n`, in 1/sample.
    pub fn derivative_at(&self, n: f64) -> f64 {
        let scale = TAU / self.len as f64;
        let x = scale * n;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| -sign(k) * a * k as f64 * scale * (k as f64 * x).sin())
            .sum()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|n| self.value_at(n as f64)).collect()
    }

    pub fn derivative(&self) -> Vec<f64> {
        (0..self.len).map(|n| self.derivative_at(n as f64)).collect()
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Window samples for `w`.
pub fn window_values(w: &CosineSumWindow) -> Vec<f64> {
    w.values()
}

/// Analytic derivative samples for `w`.
pub fn window_derivative(w: &CosineSumWindow) -> Vec<f64> {
    w.derivative()
}
