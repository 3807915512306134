//! Compactly supported test functions on (0, ∞) and their Mellin transforms
//! `f̂(s) = ∫ f(t) t^s dt/t`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{integrate_breakpoints, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Smoothness {
    SmoothBump,
    Spline,
    RawIndicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TestFunction {
    /// `exp(1 - 1/(1 - u²))` with `u` the affine coordinate in `log t` that maps
    /// `[log a, log b]` to `[-1, 1]`; peak 1 at `√(ab)`.
    Bump { a: f64, b: f64 },
    /// `1` on `[a, b]`.
    Indicator { a: f64, b: f64 },
    Zero,
    /// `t ↦ f(t / λ)`.
    Dilated { inner: Box<TestFunction>, lambda: f64 },
    /// `Σ c_i f_i`.
    Combination(Vec<(f64, TestFunction)>),
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "support [{a}, {b}] must satisfy 0 < a < b < ∞"
        )));
    }
    Ok(())
}

pub fn make_bump(a: f64, b: f64) -> Result<TestFunction> {
    check_interval(a, b)?;
    Ok(TestFunction::Bump { a, b })
}

pub fn make_indicator(a: f64, b: f64) -> Result<TestFunction> {
    check_interval(a, b)?;
    Ok(TestFunction::Indicator { a, b })
}

/// Bump of half-width `ratio` (multiplicative) around `centre`, so that
/// `f(centre) = 1` and the support is `[centre/ratio, centre·ratio]`.
pub fn bump_around(centre: f64, ratio: f64) -> Result<TestFunction> {
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(Error::InvalidArgument("ratio must exceed 1".into()));
    }
    make_bump(centre / ratio, centre * ratio)
}

fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::Bump { a, b } => {
                if t <= *a || t >= *b {
                    return 0.0;
                }
                let (la, lb) = (a.ln(), b.ln());
                let u = (2.0 * t.ln() - la - lb) / (lb - la);
                bump_profile(u)
            }
            TestFunction::Indicator { a, b } => {
                if t >= *a && t <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Zero => 0.0,
            TestFunction::Dilated { inner, lambda } => inner.eval(t / lambda),
            TestFunction::Combination(parts) => parts.iter().map(|(c, f)| c * f.eval(t)).sum(),
        }
    }

    /// Smallest `[a, b]` outside which the function vanishes; `None` for
    /// the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            TestFunction::Bump { a, b } | TestFunction::Indicator { a, b } => Some((*a, *b)),
            TestFunction::Zero => None,
            TestFunction::Dilated { inner, lambda } => {
                inner.support().map(|(a, b)| (a * lambda, b * lambda))
            }
            TestFunction::Combination(parts) => parts
                .iter()
                .filter(|(c, _)| *c != 0.0)
                .filter_map(|(_, f)| f.support())
                .reduce(|x, y| (x.0.min(y.0), x.1.max(y.1))),
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            TestFunction::Bump { .. } | TestFunction::Zero => Smoothness::SmoothBump,
            TestFunction::Indicator { .. } => Smoothness::RawIndicator,
            TestFunction::Dilated { inner, .. } => inner.smoothness(),
            TestFunction::Combination(parts) => {
                if parts.iter().any(|(_, f)| f.smoothness() == Smoothness::RawIndicator) {
                    Smoothness::RawIndicator
                } else {
                    Smoothness::SmoothBump
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_none()
    }

    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        Ok(TestFunction::Dilated {
            inner: Box::new(self.clone()),
            lambda,
        })
    }

    pub fn description(&self) -> String {
        self.to_string()
    }

    /// Points in `log t` where the function is not smooth, or changes shape.
    fn log_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            TestFunction::Bump { a, b } => {
                out.extend([a.ln(), 0.5 * (a.ln() + b.ln()), b.ln()]);
            }
            TestFunction::Indicator { a, b } => out.extend([a.ln(), b.ln()]),
            TestFunction::Zero => {}
            TestFunction::Dilated { inner, lambda } => {
                let mut v = Vec::new();
                inner.log_breakpoints(&mut v);
                out.extend(v.into_iter().map(|x| x + lambda.ln()));
            }
            TestFunction::Combination(parts) => {
                for (_, f) in parts {
                    f.log_breakpoints(out);
                }
            }
        }
    }
}

/// `f̂(s) = ∫_R f(e^x) e^{sx} dx`, integrated in `x = log t` over panels short
/// enough to resolve the oscillation `e^{i Im(s) x}`.
pub fn mellin(f: &TestFunction, s: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let (a, b) = match f.support() {
        Some(ab) => ab,
        None => return Ok(Complex64::new(0.0, 0.0)),
    };
    let (la, lb) = (a.ln(), b.ln());
    let mut cuts = Vec::new();
    f.log_breakpoints(&mut cuts);
    let pieces = ((s.im.abs() * (lb - la) / std::f64::consts::PI).ceil() as usize).max(1);
    cuts.extend((0..=pieces).map(|k| la + (lb - la) * k as f64 / pieces as f64));
    cuts.retain(|x| *x >= la && *x <= lb);
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let value = integrate_breakpoints(|x| (s * x).exp() * f.eval(x.exp()), &cuts, cfg)?;
    crate::error::check_finite(value, "Mellin transform")?;
    Ok(value)
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Bump { a, b } => write!(f, "bump:{a}:{b}"),
            TestFunction::Indicator { a, b } => write!(f, "indicator:{a}:{b}"),
            TestFunction::Zero => write!(f, "zero"),
            TestFunction::Dilated { inner, lambda } => write!(f, "({inner})(t/{lambda})"),
            TestFunction::Combination(parts) => {
                let terms: Vec<String> = parts.iter().map(|(c, g)| format!("{c}*{g}")).collect();
                write!(f, "{}", terms.join(" + "))
            }
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `bump:A:B`, `indicator:A:B` or `zero`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "zero" {
            return Ok(TestFunction::Zero);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("cannot parse test function `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[1].parse().map_err(|_| bad())?;
        let b: f64 = parts[2].parse().map_err(|_| bad())?;
        match parts[0] {
            "bump" => make_bump(a, b),
            "indicator" => make_indicator(a, b),
            _ => Err(bad()),
        }
    }
}
