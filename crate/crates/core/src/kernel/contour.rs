use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_breakpoints, QuadratureConfig};
use crate::error::{Error, Result};

/// Value of `(1/2πi) ∫_{Re s = c} g(s) ds` truncated at `|Im s| <= T`, with an
/// estimate of the discarded tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineIntegral {
    pub value: Complex64,
    pub tail_bound: f64,
}

const ENVELOPE_SAMPLES: usize = 16;

fn envelope<G: Fn(Complex64) -> Complex64>(g: &G, c: f64, t0: f64) -> f64 {
    let mut m: f64 = 0.0;
    for k in 0..=ENVELOPE_SAMPLES {
        let t = t0 * (0.9 + 0.1 * k as f64 / ENVELOPE_SAMPLES as f64);
        m = m.max(g(Complex64::new(c, t)).norm());
        m = m.max(g(Complex64::new(c, -t)).norm());
    }
    m
}

/// Integrates `g` along the vertical line `Re s = c` (with `0 < c < 1`), cut
/// off at the configured truncation height.
///
/// The tail bound fits a power law `|g| ~ t^α` to the envelope of `|g|` over
/// the last decade `[T/10, T]`; `α >= -1` is reported as insufficient decay.
pub fn vertical_line_integral<G>(g: G, c: f64, cfg: &QuadratureConfig) -> Result<LineIntegral>
where
    G: Fn(Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "abscissa c = {c} must lie in (0, 1)"
        )));
    }
    let height = cfg.truncation_height;
    let panels = ((2.0 * height / 5.0).ceil() as usize).max(2);
    let points: Vec<f64> = (0..=panels)
        .map(|k| -height + 2.0 * height * k as f64 / panels as f64)
        .collect();
    let integral = integrate_breakpoints(|t| g(Complex64::new(c, t)), &points, cfg)?;
    let value = integral / (2.0 * PI);

    let end = envelope(&g, c, height);
    let tail_bound = if end == 0.0 {
        0.0
    } else {
        let start = envelope(&g, c, height / 10.0);
        if start == 0.0 {
            return Err(Error::InsufficientDecay(format!(
                "|g| vanishes near t = {} but not at t = {height}",
                height / 10.0
            )));
        }
        let alpha = (end / start).ln() / 10f64.ln();
        if alpha >= -1.0 {
            return Err(Error::InsufficientDecay(format!(
                "fitted exponent {alpha:.3} over [{}, {height}]",
                height / 10.0
            )));
        }
        // two tails, each ∫_T^∞ end·(t/T)^α dt, divided by 2π
        2.0 * end * height / (-alpha - 1.0) / (2.0 * PI)
    };
    Ok(LineIntegral { value, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrand() {
        let cfg = QuadratureConfig::default();
        let r = vertical_line_integral(|_| Complex64::new(0.0, 0.0), 0.5, &cfg).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn gaussian_in_t() {
        // g(s) = exp((s - c)^2) restricted to the line is exp(-t^2); integral sqrt(pi)/(2 pi)
        let cfg = QuadratureConfig {
            truncation_height: 20.0,
            ..QuadratureConfig::default()
        };
        let r = vertical_line_integral(|s| ((s - 0.4) * (s - 0.4)).exp(), 0.4, &cfg).unwrap();
        assert!((r.value.re - PI.sqrt() / (2.0 * PI)).abs() < 1e-12);
        assert!(r.tail_bound < 1e-100);
    }

    #[test]
    fn slow_decay_is_rejected() {
        let cfg = QuadratureConfig {
            truncation_height: 50.0,
            ..QuadratureConfig::default()
        };
        let err = vertical_line_integral(|s| s.inv(), 0.5, &cfg).unwrap_err();
        assert!(matches!(err, Error::InsufficientDecay(_)));
    }

    #[test]
    fn abscissa_must_be_in_strip() {
        let cfg = QuadratureConfig::default();
        assert!(vertical_line_integral(|s| s, 1.5, &cfg).is_err());
    }
}
