//! Local Gamma factors `Γ_ν(χ, s)`, defined by
//! `FT(χ|x|^{s-1}) = Γ_ν(χ, s) χ^{-1}(y)|y|^{-s}`, their negative logarithmic
//! derivatives `Λ_ν`, and a from-definition oracle.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::kernel::{digamma, gamma, integrate_breakpoints, QuadratureConfig};
use crate::padic::{Ball, BruhatFunction, LocalCharacter, PadicNumber, PlaceCharacter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GammaBranch {
    FiniteUnramified,
    FiniteRamified,
    RealTrivial,
    RealSign,
    ComplexTwist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub value: Complex64,
    pub branch: GammaBranch,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn gamma_factor(chi: &PlaceCharacter, s: Complex64) -> Result<GammaValue> {
    let (value, branch) = match chi {
        PlaceCharacter::Finite(local) if !local.is_ramified() => {
            (finite_unramified(local, s), GammaBranch::FiniteUnramified)
        }
        PlaceCharacter::Finite(local) => {
            let q = local.p() as f64;
            let exponent = (local.conductor_exponent() + local.delta()) as f64;
            let constant = ramified_constant(local)?;
            (constant * (s * exponent * q.ln()).exp(), GammaBranch::FiniteRamified)
        }
        PlaceCharacter::Real { odd: false } => {
            let v = c(PI).powc(0.5 - s) * gamma(s / 2.0)? / gamma((1.0 - s) / 2.0)?;
            (v, GammaBranch::RealTrivial)
        }
        PlaceCharacter::Real { odd: true } => {
            let v = -Complex64::i() * c(PI).powc(0.5 - s) * gamma((s + 1.0) / 2.0)? / gamma((2.0 - s) / 2.0)?;
            (v, GammaBranch::RealSign)
        }
        PlaceCharacter::Complex { twist } => {
            let n = twist.unsigned_abs() as f64;
            let phase = Complex64::i().powi(-(twist.unsigned_abs() as i32));
            let v = phase * c(2.0 * PI).powc(1.0 - 2.0 * s) * gamma(s + n / 2.0)? / gamma(1.0 - s + n / 2.0)?;
            (v, GammaBranch::ComplexTwist)
        }
    };
    check_finite(value, "Gamma factor")?;
    Ok(GammaValue { value, branch })
}

/// `q^{-δ/2} χ(p)^{-δ} q^{δs} (1 - χ(p)^{-1} q^{s-1}) / (1 - χ(p) q^{-s})`.
fn finite_unramified(chi: &LocalCharacter, s: Complex64) -> Complex64 {
    let q = chi.p() as f64;
    let delta = chi.delta() as f64;
    let alpha = chi.value_at_uniformizer();
    let lq = q.ln();
    let num = 1.0 - alpha.conj() * ((s - 1.0) * lq).exp();
    let den = 1.0 - alpha * (-s * lq).exp();
    q.powf(-delta / 2.0) * alpha.conj().powf(delta) * (s * delta * lq).exp() * num / den
}

type CacheKey = (u32, u32, u32, u64, Vec<(u64, u64)>);

static RAMIFIED_CONSTANTS: Lazy<Mutex<HashMap<CacheKey, Complex64>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn cache_key(chi: &LocalCharacter) -> CacheKey {
    (
        chi.p(),
        chi.delta(),
        chi.conductor_exponent(),
        chi.theta().to_bits(),
        chi.unit_table()
            .iter()
            .map(|r| r.map_or((0, 0), |r| (r.num(), r.den())))
            .collect(),
    )
}

/// `c_χ = Γ(χ, 1/2) q^{-(f+δ)/2}`, from the exact oracle with the probe
/// `1_{1 + p^f Z_p}`; computed once per character.
pub fn ramified_constant(chi: &LocalCharacter) -> Result<Complex64> {
    let key = cache_key(chi);
    let mut cache = RAMIFIED_CONSTANTS.lock().expect("cache lock");
    if let Some(v) = cache.get(&key) {
        return Ok(*v);
    }
    let half = c(0.5);
    let value = finite_oracle(chi, half, &default_finite_probe(chi)?)?;
    let q = chi.p() as f64;
    let exponent = (chi.conductor_exponent() + chi.delta()) as f64;
    let constant = value * q.powf(-exponent / 2.0);
    cache.insert(key, constant);
    Ok(constant)
}

/// `1_{1 + p^f Z_p}`: the pairing with `χ^{-1}|y|^{-s}` is its volume.
pub fn default_finite_probe(chi: &LocalCharacter) -> Result<BruhatFunction> {
    let one = PadicNumber::from_i64(chi.p(), 1)?;
    Ok(BruhatFunction::indicator(
        Ball::new(&one, chi.conductor_exponent() as i32),
        chi.delta(),
    ))
}

/// `∫ χ(x)|x|^e φ(x) dx`, exact; needs `Re e > -1` if φ(0) ≠ 0.
///
/// A ball inside the sphere `|x| = p^{-v}` with radius exponent `n` contributes
/// only if `n - v >= f` (otherwise χ averages to zero over it); a ball around 0
/// contributes a geometric series over the spheres it contains, which vanishes
/// for ramified χ.
pub fn mellin_pairing(chi: &LocalCharacter, e: Complex64, phi: &BruhatFunction) -> Result<Complex64> {
    let q = chi.p() as f64;
    let lq = q.ln();
    let f = chi.conductor_exponent() as i32;
    let delta = phi.delta() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (coef, ball) in phi.terms() {
        let n = ball.radius_exp();
        match ball.center().valuation() {
            Some(v) => {
                if n - v >= f {
                    let chi_c = chi.eval(ball.center())?;
                    acc += coef * ball.volume(phi.delta()) * chi_c * (-(v as f64) * lq * e).exp();
                }
            }
            None => {
                if chi.is_ramified() {
                    continue;
                }
                let r = chi.value_at_uniformizer() * (-(e + 1.0) * lq).exp();
                if r.norm() >= 1.0 {
                    return Err(Error::Divergent(format!(
                        "∫ χ|x|^e near 0 diverges for Re e = {}",
                        e.re
                    )));
                }
                let shells = q.powf(-delta / 2.0) * (1.0 - 1.0 / q);
                acc += coef * shells * r.powi(n) / (1.0 - r);
            }
        }
    }
    Ok(acc)
}

fn finite_oracle(chi: &LocalCharacter, s: Complex64, probe: &BruhatFunction) -> Result<Complex64> {
    if probe.p() != chi.p() || probe.delta() != chi.delta() {
        return Err(Error::InvalidArgument("probe lives on a different place".into()));
    }
    let den = mellin_pairing(&chi.inverse(), -s, probe)?;
    let scale = probe.max_abs_coefficient().max(f64::MIN_POSITIVE);
    if den.norm() <= 1e-13 * scale * probe.integrate().norm().clamp(1e-300, 1.0) || den.norm() == 0.0 {
        return Err(Error::VanishingPairing);
    }
    let num = mellin_pairing(chi, s - 1.0, &probe.fourier()?)?;
    Ok(num / den)
}

/// Probe functions for the archimedean oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    /// Exact Bruhat function at a finite place.
    Bruhat(BruhatFunction),
    /// `x^ε e^{-πax²}` on R (ε the parity of χ), or `z^n e^{-2πa|z|}` on C
    /// (conjugated for negative twists).
    Gaussian { a: f64 },
}

/// Ratio `⟨FT(χ|x|^{s-1}), φ⟩ / ⟨χ^{-1}|y|^{-s}, φ⟩`, exact at finite places
/// and by quadrature of Gaussian Mellin integrals otherwise.
pub fn gamma_numeric_oracle(
    chi: &PlaceCharacter,
    s: Complex64,
    probe: &Probe,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} outside the strip 0 < Re s < 1")));
    }
    let value = match (chi, probe) {
        (PlaceCharacter::Finite(local), Probe::Bruhat(phi)) => finite_oracle(local, s, phi)?,
        (PlaceCharacter::Finite(local), Probe::Gaussian { .. }) => {
            finite_oracle(local, s, &default_finite_probe(local)?)?
        }
        (PlaceCharacter::Real { odd }, Probe::Gaussian { a }) => {
            let a = *a;
            if *odd {
                // φ = y e^{-πay²}, FT φ = -i a^{-3/2} x e^{-πx²/a}
                let num = gaussian_mellin(1.0 / a, s + 1.0, cfg)? * a.powf(-1.5) * -Complex64::i();
                let den = gaussian_mellin(a, 2.0 - s, cfg)?;
                ratio(num, den)?
            } else {
                // φ = e^{-πay²}, FT φ = a^{-1/2} e^{-πx²/a}
                let num = gaussian_mellin(1.0 / a, s, cfg)? * a.powf(-0.5);
                let den = gaussian_mellin(a, 1.0 - s, cfg)?;
                ratio(num, den)?
            }
        }
        (PlaceCharacter::Complex { twist }, Probe::Gaussian { a }) => {
            // φ = z^n e^{-2πa|z|}, FT φ = (-i)^n a^{-1-n} w̄^n e^{-2π|w|/a};
            // radial integrals ∫ r^{β-1} e^{-2πar²} dr = M_{2a}(β)
            let a = *a;
            let n = twist.unsigned_abs() as f64;
            let phase = Complex64::i().powi(-(twist.unsigned_abs() as i32));
            let num = gaussian_mellin(2.0 / a, 2.0 * s + n, cfg)? * a.powf(-1.0 - n) * phase;
            let den = gaussian_mellin(2.0 * a, n - 2.0 * s + 2.0, cfg)?;
            ratio(num, den)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "probe type does not match the place".into(),
            ))
        }
    };
    check_finite(value, "Gamma oracle")?;
    Ok(value)
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() == 0.0 || !den.norm().is_normal() {
        return Err(Error::VanishingPairing);
    }
    Ok(num / den)
}

fn expm1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        w * (1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)))
    } else {
        w.exp() - 1.0
    }
}

/// `M_a(σ) = ∫_0^∞ x^{σ-1} e^{-πax²} dx` for `Re σ > 0`, by quadrature in
/// `x = e^t` along the rotated line `t + iα`, `α = 0.225π·sign(Im σ)`. The rotation
/// removes most of the cancellation from the oscillating factor; the part of
/// `e^{σz}` below `t = 0` is integrated in closed form.
pub fn gaussian_mellin(a: f64, sigma: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if sigma.re.is_nan() || sigma.re <= 0.0 {
        return Err(Error::InvalidArgument(format!("M_a(σ) needs Re σ > 0, got {sigma}")));
    }
    let alpha = 0.225 * PI * sigma.im.signum();
    let rot = Complex64::new(0.0, alpha);
    let analytic = rot.exp().powc(sigma) / sigma;
    // the integrands are of size |e^{iασ}|; the result is smaller by at most about e^{-0.08|Im σ|}
    let cfg = QuadratureConfig {
        absolute_tolerance: 1e-13 * rot.exp().powc(sigma).norm(),
        relative_tolerance: cfg.relative_tolerance.min(1e-12),
        ..*cfg
    };
    let w = |t: f64| -PI * a * (2.0 * (t + rot)).exp();
    // decay of the e^{σz}(e^w - 1) piece at -∞ is like e^{(Re σ + 2) t}
    let lower = -(40.0 / (sigma.re + 2.0)).max(5.0) * 2.0;
    // e^{-πa e^{2t} cos 2α} is negligible beyond this
    let upper = 0.5 * ((800.0 / (PI * a * (2.0 * alpha).cos())).ln()).max(1.0);
    let head: Vec<f64> = (0..=8).map(|k| lower * (1.0 - k as f64 / 8.0)).collect();
    let inner = integrate_breakpoints(|t| (sigma * (t + rot)).exp() * expm1(w(t)), &head, &cfg)?;
    let tail_pts: Vec<f64> = (0..=8).map(|k| upper * k as f64 / 8.0).collect();
    let outer = integrate_breakpoints(|t| (sigma * (t + rot) + w(t)).exp(), &tail_pts, &cfg)?;
    Ok(inner + analytic + outer)
}

/// `Λ_ν(χ, s) = -Γ'/Γ`.
pub fn lambda_log_derivative(chi: &PlaceCharacter, s: Complex64) -> Result<Complex64> {
    let value = match chi {
        PlaceCharacter::Finite(local) => {
            let q = local.p() as f64;
            let lq = q.ln();
            let delta = local.delta() as f64;
            if local.is_ramified() {
                c(-(local.conductor_exponent() as f64 + delta) * lq)
            } else {
                let alpha = local.value_at_uniformizer();
                let x = alpha.conj() * ((s - 1.0) * lq).exp();
                let y = alpha * (-s * lq).exp();
                -delta * lq + lq * (x / (1.0 - x) + y / (1.0 - y))
            }
        }
        PlaceCharacter::Real { odd: false } => {
            PI.ln() - 0.5 * digamma(s / 2.0)? - 0.5 * digamma((1.0 - s) / 2.0)?
        }
        PlaceCharacter::Real { odd: true } => {
            PI.ln() - 0.5 * digamma((s + 1.0) / 2.0)? - 0.5 * digamma((2.0 - s) / 2.0)?
        }
        PlaceCharacter::Complex { twist } => {
            let n = twist.unsigned_abs() as f64 / 2.0;
            2.0 * (2.0 * PI).ln() - digamma(s + n)? - digamma(1.0 - s + n)?
        }
    };
    check_finite(value, "Λ")?;
    Ok(value)
}
