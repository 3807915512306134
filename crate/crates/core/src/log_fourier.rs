//! The distribution `G_ν`, Fourier transform of `-log|x|_ν`, evaluated on
//! test functions through its regularized forms
//! `G(φ) = γ P_ω(φ) + G(ω) φ(0)` with `P_ω(φ) = ∫ (φ(x) - φ(0) ω(x)) dx/|x|`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::kernel::{integrate_breakpoints, integrate_to_infinity, QuadratureConfig, EULER_GAMMA};
use crate::padic::{Ball, BruhatFunction, PadicNumber, Place};

/// Reference function `ω` used to regularize `∫ φ dx/|x|` at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OmegaTag {
    /// `ω = 1_O`.
    FiniteUnitBall,
    /// `ω₁ = 1_O - 1_{1 + pO}`.
    FiniteOmega1,
    /// `ω = exp(-π x²)`.
    RealGaussian,
    /// `ω = 1_{|x| ≤ 1}`.
    RealIndicator,
    /// `ω = sin(πx)/(πx)`.
    RealSinc,
    /// `ω = (sin(πx)/(πx))²`.
    RealSincSquared,
    /// `ω = exp(-π z z̄)`.
    ComplexGaussian,
    /// `ω = 1_{|z| ≤ 1}`.
    ComplexUnitDisc,
}

impl OmegaTag {
    pub const ALL: [OmegaTag; 8] = [
        OmegaTag::FiniteUnitBall,
        OmegaTag::FiniteOmega1,
        OmegaTag::RealGaussian,
        OmegaTag::RealIndicator,
        OmegaTag::RealSinc,
        OmegaTag::RealSincSquared,
        OmegaTag::ComplexGaussian,
        OmegaTag::ComplexUnitDisc,
    ];

    /// Tags valid at `place`.
    pub fn for_place(place: &Place) -> &'static [OmegaTag] {
        match place {
            Place::Finite { .. } => &Self::ALL[0..2],
            Place::Real => &Self::ALL[2..6],
            Place::Complex => &Self::ALL[6..8],
        }
    }

    /// Tag used when none is requested.
    pub fn default_for(place: &Place) -> OmegaTag {
        match place {
            Place::Finite { .. } => OmegaTag::FiniteOmega1,
            Place::Real => OmegaTag::RealIndicator,
            Place::Complex => OmegaTag::ComplexUnitDisc,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            OmegaTag::FiniteUnitBall => "finiteUnitBall",
            OmegaTag::FiniteOmega1 => "finiteOmega1",
            OmegaTag::RealGaussian => "realGaussian",
            OmegaTag::RealIndicator => "realIndicator",
            OmegaTag::RealSinc => "realSinc",
            OmegaTag::RealSincSquared => "realSincSquared",
            OmegaTag::ComplexGaussian => "complexGaussian",
            OmegaTag::ComplexUnitDisc => "complexUnitDisc",
        }
    }
}

impl fmt::Display for OmegaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OmegaTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        OmegaTag::ALL
            .iter()
            .find(|t| t.name().to_ascii_lowercase() == key)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown regularization tag {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularizationConstants {
    pub place: Place,
    pub omega_tag: OmegaTag,
    /// Residue of `Δ_s(ω)` at `s = 1` up to normalization; `γ = 1/R`.
    pub r: f64,
    pub gamma: f64,
    pub p_omega: f64,
    pub g_omega: f64,
    /// `G(ω) - γ P(ω)`, shared by every tag at one place.
    pub tau: f64,
}

fn incompatible(place: &Place, tag: OmegaTag) -> Error {
    Error::IncompatibleTag {
        tag: tag.to_string(),
        place: place.to_string(),
    }
}

pub fn constants_for(place: &Place, tag: OmegaTag) -> Result<RegularizationConstants> {
    if !OmegaTag::for_place(place).contains(&tag) {
        return Err(incompatible(place, tag));
    }
    let (r, p_omega, g_omega, tau) = match place {
        Place::Finite { p, delta } => {
            let q = *p as f64;
            let d = *delta as f64;
            let lq = q.ln();
            let r = q.powf(-d / 2.0) * (1.0 - 1.0 / q) / lq;
            let tau = lq / (q - 1.0) - d * lq - 0.5 * lq;
            match tag {
                OmegaTag::FiniteUnitBall => (r, 0.5 * lq * r, lq / (q - 1.0) - d * lq, tau),
                _ => (r, 0.5 * lq * r - q.powf(-d / 2.0 - 1.0), -d * lq, tau),
            }
        }
        Place::Real => {
            let tau = (2.0 * PI).ln() + EULER_GAMMA;
            let g_omega = match tag {
                OmegaTag::RealGaussian => (PI.ln() + EULER_GAMMA + 2.0 * LN_2) / 2.0,
                OmegaTag::RealIndicator => tau,
                OmegaTag::RealSinc => 1.0 + LN_2,
                _ => 1.5,
            };
            let p_omega = match tag {
                OmegaTag::RealGaussian => -(PI.ln() + EULER_GAMMA),
                OmegaTag::RealIndicator => 0.0,
                _ => 2.0 * (g_omega - tau),
            };
            (2.0, p_omega, g_omega, tau)
        }
        Place::Complex => {
            let tau = 2.0 * ((2.0 * PI).ln() + EULER_GAMMA);
            match tag {
                OmegaTag::ComplexGaussian => (
                    2.0 * PI,
                    -2.0 * PI * (PI.ln() + EULER_GAMMA),
                    (4.0 * PI).ln() + EULER_GAMMA,
                    tau,
                ),
                _ => (2.0 * PI, 0.0, tau, tau),
            }
        }
    };
    Ok(RegularizationConstants {
        place: *place,
        omega_tag: tag,
        r,
        gamma: 1.0 / r,
        p_omega,
        g_omega,
        tau,
    })
}

/// `ω` for a finite-place tag, as a Bruhat function.
pub fn finite_omega(p: u32, delta: u32, tag: OmegaTag) -> Result<BruhatFunction> {
    let unit_ball = BruhatFunction::indicator(Ball::around_zero(p, 0), delta);
    match tag {
        OmegaTag::FiniteUnitBall => Ok(unit_ball),
        OmegaTag::FiniteOmega1 => {
            let one = PadicNumber::from_i64(p, 1)?;
            Ok(unit_ball.sub(&BruhatFunction::indicator(Ball::new(&one, 1), delta)))
        }
        _ => Err(incompatible(&Place::Finite { p, delta }, tag)),
    }
}

/// Exact `G(φ)` for a Bruhat–Schwartz function; the result does not depend
/// on the tag.
pub fn g_eval_finite(phi: &BruhatFunction, tag: OmegaTag) -> Result<Complex64> {
    let place = Place::Finite {
        p: phi.p(),
        delta: phi.delta(),
    };
    let k = constants_for(&place, tag)?;
    let phi0 = phi.value_at_zero();
    let omega = finite_omega(phi.p(), phi.delta(), tag)?;
    let regular = phi.sub(&omega.scale(phi0));
    Ok(k.gamma * regular.integrate_dx_over_abs()? + k.g_omega * phi0)
}

/// `∫ (-log|y|) φ̃(y) dy` computed from the exact Fourier transform.
pub fn g_oracle_finite(phi: &BruhatFunction) -> Result<Complex64> {
    let q = phi.p() as f64;
    let lq = q.ln();
    let delta = phi.delta();
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, ball) in phi.fourier()?.terms() {
        match ball.center().valuation().filter(|&v| v < ball.radius_exp()) {
            Some(v) => acc += c * ball.volume(delta) * (v as f64) * lq,
            None => {
                // Σ_{k ≥ n} k vol(|y| = q^{-k})
                let n = ball.radius_exp() as f64;
                let x = 1.0 / q;
                let shells = x.powf(n) * (n / (1.0 - x) + x / ((1.0 - x) * (1.0 - x)));
                acc += c * lq * q.powf(-(delta as f64) / 2.0) * (1.0 - x) * shells;
            }
        }
    }
    Ok(acc)
}

/// Where an archimedean test function lives.  `radius` bounds the support
/// (`|x|` at the real place, `|z|` as a modulus at the complex place);
/// `breakpoints` lists moduli where the function is not smooth or changes
/// scale; `spectral_radius` truncates the Fourier side in the oracle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArchSupport {
    pub radius: Option<f64>,
    pub breakpoints: Vec<f64>,
    pub spectral_radius: Option<f64>,
}

impl ArchSupport {
    pub fn compact(radius: f64) -> Self {
        Self {
            radius: Some(radius),
            ..Default::default()
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    fn points_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v = vec![lo];
        let mut inner: Vec<f64> = self
            .breakpoints
            .iter()
            .map(|x| x.abs())
            .filter(|&x| x > lo && x < hi)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        v.extend(inner);
        v.push(hi);
        v
    }

    fn reach(&self) -> f64 {
        let bp = self.breakpoints.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.radius.unwrap_or(0.0).max(bp)
    }
}

/// A function on `R` or `C` for the archimedean routines.
pub enum ArchFunction<'a> {
    Real(&'a dyn Fn(f64) -> Complex64),
    Complex(&'a dyn Fn(Complex64) -> Complex64),
}

impl ArchFunction<'_> {
    fn place(&self) -> Place {
        match self {
            ArchFunction::Real(_) => Place::Real,
            ArchFunction::Complex(_) => Place::Complex,
        }
    }
}

/// `G(φ)` at an archimedean place through the regularized form for `tag`.
pub fn g_eval_arch(phi: &ArchFunction<'_>, support: &ArchSupport, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<Complex64> {
    let place = phi.place();
    let k = constants_for(&place, tag)?;
    let value = match phi {
        ArchFunction::Real(f) => g_real(*f, support, &k, cfg)?,
        ArchFunction::Complex(f) => g_complex(*f, support, &k, cfg)?,
    };
    check_finite(value, "G(φ)")
}

fn g_real(phi: &dyn Fn(f64) -> Complex64, support: &ArchSupport, k: &RegularizationConstants, cfg: &QuadratureConfig) -> Result<Complex64> {
    let phi0 = phi(0.0);
    let even = |x: f64| phi(x) + phi(-x);
    // ∫_lo^∞ (φ(x) + φ(-x)) dx/x
    let outer = |lo: f64| -> Result<Complex64> {
        match support.radius {
            Some(r) if r <= lo => Ok(Complex64::new(0.0, 0.0)),
            Some(r) => integrate_breakpoints(|x| even(x) / x, &support.points_between(lo, r), cfg),
            None => {
                let hi = support.reach().max(lo);
                let body = integrate_breakpoints(|x| even(x) / x, &support.points_between(lo, hi), cfg)?;
                Ok(body + integrate_to_infinity(|x| even(x) / x, hi, cfg)?)
            }
        }
    };
    // P_ω(φ) = ∫_0^∞ (φ(x) + φ(-x) - 2 φ(0) ω(x)) dx/x
    let p = match k.omega_tag {
        OmegaTag::RealIndicator => {
            let inner = integrate_breakpoints(|x| (even(x) - 2.0 * phi0) / x, &support.points_between(0.0, 1.0), cfg)?;
            inner + outer(1.0)?
        }
        OmegaTag::RealGaussian => {
            let g = |x: f64| (-PI * x * x).exp();
            let hi = support.reach().max(1.0);
            let body = integrate_breakpoints(|x| (even(x) - 2.0 * phi0 * g(x)) / x, &support.points_between(0.0, hi), cfg)?;
            let tail = integrate_to_infinity(|x| Complex64::new(g(x) / x, 0.0), hi, cfg)?;
            body - 2.0 * phi0 * tail + outer(hi)?
        }
        _ => {
            let squared = k.omega_tag == OmegaTag::RealSincSquared;
            let omega = |x: f64| {
                let s = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                if squared {
                    s * s
                } else {
                    s
                }
            };
            // panels of width 1/2 up to an even integer, analytic tail beyond
            let x_max = (support.reach().max(20.0) / 2.0).ceil() * 2.0;
            let mut points = support.points_between(0.0, x_max);
            points.extend((1..(2.0 * x_max) as usize).map(|j| j as f64 / 2.0));
            points.sort_by(f64::total_cmp);
            points.dedup();
            let body = integrate_breakpoints(|x| (even(x) - 2.0 * phi0 * omega(x)) / x, &points, cfg)?;
            let tail = if squared {
                sinc_squared_tail(x_max)
            } else {
                sinc_tail(x_max)
            };
            body - 2.0 * phi0 * tail + outer(x_max)?
        }
    };
    Ok(k.gamma * p + k.g_omega * phi0)
}

/// `∫_X^∞ sin(bx) x^{-n} dx` for `X` with `sin(bX) = 0`, `cos(bX) = 1`,
/// by repeated integration by parts, stopped at the smallest term.
fn sine_tail(b: f64, n: u32, x: f64) -> f64 {
    let mut term = 1.0 / (b * x.powi(n as i32));
    let mut sum = 0.0;
    let mut m = n as f64;
    loop {
        sum += term;
        let next = -term * m * (m + 1.0) / (b * b * x * x);
        if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
            return sum;
        }
        term = next;
        m += 2.0;
    }
}

/// `∫_X^∞ sinc(x)/x dx` for even integer `X`.
pub(crate) fn sinc_tail(x: f64) -> f64 {
    sine_tail(PI, 2, x) / PI
}

/// `∫_X^∞ sinc²(x)/x dx` for even integer `X`, using
/// `∫_X^∞ cos(bx) x^{-3} dx = (3/b) ∫_X^∞ sin(bx) x^{-4} dx`.
pub(crate) fn sinc_squared_tail(x: f64) -> f64 {
    let b = 2.0 * PI;
    let cos_part = 3.0 / b * sine_tail(b, 4, x);
    (1.0 / (4.0 * x * x) - 0.5 * cos_part) / (PI * PI)
}

/// `∫_0^{2π} φ(r e^{iθ}) dθ` by the trapezoid rule, doubling until settled.
pub(crate) fn circle_integral(phi: &dyn Fn(Complex64) -> Complex64, r: f64) -> Result<Complex64> {
    if r == 0.0 {
        return Ok(2.0 * PI * phi(Complex64::new(0.0, 0.0)));
    }
    let mut n = 16usize;
    let mut sum: Complex64 = (0..n).map(|j| phi(Complex64::from_polar(r, 2.0 * PI * j as f64 / n as f64))).sum();
    let mut estimate = sum * (2.0 * PI / n as f64);
    while n < 1 << 16 {
        let odd: Complex64 = (0..n)
            .map(|j| phi(Complex64::from_polar(r, PI * (2 * j + 1) as f64 / n as f64)))
            .sum();
        sum += odd;
        n *= 2;
        let next = sum * (2.0 * PI / n as f64);
        let settled = (next - estimate).norm() <= 1e-14 * (1.0 + next.norm());
        estimate = next;
        if settled && n >= 32 {
            return Ok(estimate);
        }
    }
    Err(Error::NonConvergence {
        estimate,
        error: f64::NAN,
        subdivisions: n,
    })
}

fn g_complex(phi: &dyn Fn(Complex64) -> Complex64, support: &ArchSupport, k: &RegularizationConstants, cfg: &QuadratureConfig) -> Result<Complex64> {
    let phi0 = phi(Complex64::new(0.0, 0.0));
    // with dz = 2r dr dθ and |z|_C = r², dz/|z|_C = 2 dr dθ / r
    let radial = |r: f64| circle_integral(phi, r);
    let integrand = |r: f64, weight: f64| match radial(r) {
        Ok(v) => 2.0 * (v - 2.0 * PI * phi0 * weight) / r,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let hi = support.reach().max(1.0);
    let p = match k.omega_tag {
        OmegaTag::ComplexUnitDisc => {
            let body = integrate_breakpoints(|r| integrand(r, 1.0), &support.points_between(0.0, 1.0), cfg)?
                + integrate_breakpoints(|r| integrand(r, 0.0), &support.points_between(1.0, hi), cfg)?;
            match support.radius {
                Some(_) => body,
                None => body + integrate_to_infinity(|r| integrand(r, 0.0), hi, cfg)?,
            }
        }
        _ => {
            let g = |r: f64| (-PI * r * r).exp();
            let body = integrate_breakpoints(|r| integrand(r, g(r)), &support.points_between(0.0, hi), cfg)?;
            match support.radius {
                Some(_) => {
                    let tail = integrate_to_infinity(|r| Complex64::new(2.0 * g(r) / r, 0.0), hi, cfg)?;
                    body - 2.0 * PI * phi0 * tail
                }
                None => body + integrate_to_infinity(|r| integrand(r, g(r)), hi, cfg)?,
            }
        }
    };
    Ok(k.gamma * p + k.g_omega * phi0)
}

/// `∫ (-log|y|) φ̃(y) dy` with `φ̃` itself obtained by quadrature.  At the
/// complex place only the circular average of `φ` matters.
pub fn g_oracle_arch(phi: &ArchFunction<'_>, support: &ArchSupport, cfg: &QuadratureConfig) -> Result<Complex64> {
    let reach = support.reach();
    if reach == 0.0 && support.radius.is_none() {
        return Err(Error::InvalidArgument("the oracle needs a support radius".into()));
    }
    let spectral = support.spectral_radius.unwrap_or(10.0);
    let inner_points = support.points_between(0.0, reach.max(1.0));
    let mut outer_points: Vec<f64> = (0..=(4.0 * spectral).ceil() as usize).map(|j| j as f64 / 4.0).collect();
    outer_points.retain(|&y| y <= spectral);
    let value = match phi {
        ArchFunction::Real(f) => {
            // φ̃(y) + φ̃(-y) = 2 ∫_0^∞ (φ(x) + φ(-x)) cos(2πxy) dx
            let cosine = |y: f64| -> Complex64 {
                integrate_breakpoints(|x| (f(x) + f(-x)) * (2.0 * PI * x * y).cos(), &inner_points, cfg)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            };
            -integrate_breakpoints(|y| 2.0 * y.ln() * cosine(y), &outer_points, cfg)?
        }
        ArchFunction::Complex(f) => {
            // radial transform: φ̃(ρ) = 2 ∫ r Φ(r) J0(4π r ρ) dr, Φ the circle integral
            let avg = |r: f64| circle_integral(*f, r).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let transform = |rho: f64| -> Complex64 {
                integrate_breakpoints(|r| 2.0 * r * avg(r) * bessel_j0(4.0 * PI * r * rho), &inner_points, cfg)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            };
            // -log|w|_C = -2 log ρ, dw = 2ρ dρ dθ
            -integrate_breakpoints(|rho| 8.0 * PI * rho * rho.ln() * transform(rho), &outer_points, cfg)?
        }
    };
    check_finite(value, "oracle G(φ)")
}

/// `J0(x) = (1/π) ∫_0^π cos(x sin θ) dθ` by the trapezoid rule, which is
/// spectrally accurate once the node count exceeds `x`.
fn bessel_j0(x: f64) -> f64 {
    let n = (x.abs() as usize + 40).max(32);
    let h = PI / n as f64;
    let s: f64 = (0..n).map(|j| (x * (h * (j as f64 + 0.5)).sin()).cos()).sum();
    s / n as f64
}
