//! Additive and multiplicative Haar integrals of Bruhat functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bruhat::BruhatFunction;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Self-dual additive measure, `vol(Z_p) = p^(-δ/2)`.
    Additive,
    /// `d^×u = γ du/|u|` with `γ = log q / (q^(-δ/2)(1 - 1/q))`, giving the
    /// units volume `log q`.
    Multiplicative,
}

/// `γ = 1/R` with `R = q^(-δ/2)(1 - 1/q)/log q`.
pub fn multiplicative_normalization(q: u32, delta: u32) -> f64 {
    let q = q as f64;
    q.ln() / (q.powf(-(delta as f64) / 2.0) * (1.0 - 1.0 / q))
}

pub fn haar_integral(phi: &BruhatFunction, measure: Measure) -> Result<Complex64> {
    match measure {
        Measure::Additive => Ok(phi.integrate()),
        Measure::Multiplicative => {
            let gamma = multiplicative_normalization(phi.p(), phi.delta());
            Ok(phi.integrate_dx_over_abs()? * gamma)
        }
    }
}
