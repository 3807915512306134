//! Local terms `W_ν(F) = (G_ν ∗ F_ν)(1)` of the explicit formula for
//! `F(u) = f(|u|) χ^{-1}(u)`, the conductor integral, and the conductor
//! operator `H = A + F A F^{-1}` on Bruhat functions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, Error, Result};
use crate::gamma_factors::lambda_log_derivative;
use crate::kernel::{
    integrate_breakpoints, integrate_from_neg_infinity, integrate_to_infinity, vertical_line_integral, LineIntegral,
    QuadratureConfig,
};
use crate::log_fourier::{constants_for, sinc_squared_tail, sinc_tail, g_eval_arch, g_eval_finite, ArchFunction, ArchSupport, OmegaTag};
use crate::padic::{Ball, BruhatFunction, LocalCharacter, PadicNumber, Place, PlaceCharacter};
use crate::test_functions::{mellin, TestFunction};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// The restriction `F_ν` of `F(u) = f(|u|) χ^{-1}(u)` to one place.
#[derive(Debug, Clone, PartialEq)]
pub struct IdeleLocalComponent {
    pub place: Place,
    pub test_function: TestFunction,
    pub character: PlaceCharacter,
}

impl IdeleLocalComponent {
    pub fn new(test_function: TestFunction, character: PlaceCharacter) -> Self {
        Self {
            place: character.place(),
            test_function,
            character,
        }
    }

    /// `F(1) = f(1)`.
    pub fn value_at_one(&self) -> f64 {
        self.test_function.eval(1.0)
    }

    /// `F(x)` at the real place.
    pub fn eval_real(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            return zero();
        }
        let sign = match self.character {
            PlaceCharacter::Real { odd: true } => x.signum(),
            _ => 1.0,
        };
        Complex64::new(self.test_function.eval(x.abs()) * sign, 0.0)
    }

    /// `F(z)` at the complex place, with `|z|_C = z z̄`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            return zero();
        }
        let n = match self.character {
            PlaceCharacter::Complex { twist } => twist,
            _ => 0,
        };
        let f = self.test_function.eval(r2);
        if f == 0.0 {
            return zero();
        }
        f * Complex64::from_polar(1.0, -(n as f64) * z.arg())
    }

    fn local_character(&self) -> Result<&LocalCharacter> {
        match &self.character {
            PlaceCharacter::Finite(c) => Ok(c),
            _ => Err(Error::InvalidArgument(format!("{} is not a finite place", self.place))),
        }
    }

    /// `(k, f(q^{-k}))` for every annulus `|x| = q^{-k}` where `f` is nonzero.
    pub fn finite_shells(&self) -> Result<Vec<(i32, f64)>> {
        let chi = self.local_character()?;
        let Some((a, b)) = self.test_function.support() else {
            return Ok(Vec::new());
        };
        let lq = (chi.p() as f64).ln();
        let lo = (-b.ln() / lq).floor() as i32 - 1;
        let hi = (-a.ln() / lq).ceil() as i32 + 1;
        Ok((lo..=hi)
            .map(|k| (k, self.test_function.eval((chi.p() as f64).powi(-k))))
            .filter(|(_, v)| *v != 0.0)
            .collect())
    }

    /// Exact Bruhat realization: each annulus split into cosets of
    /// `1 + p^f O` on which `χ^{-1}` is constant.
    pub fn bruhat(&self) -> Result<BruhatFunction> {
        let chi = self.local_character()?;
        let (p, delta) = (chi.p(), chi.delta());
        let f = chi.conductor_exponent().max(1);
        let modulus = (p as u64).pow(f);
        let inv = chi.inverse();
        let mut terms = Vec::new();
        for (k, value) in self.finite_shells()? {
            for u in (1..modulus).filter(|u| u % p as u64 != 0) {
                let centre = PadicNumber::from_i64(p, u as i64)?.shift(k);
                terms.push((value * inv.eval_parts(k, u), Ball::new(&centre, k + f as i32)));
            }
        }
        Ok(BruhatFunction::from_terms(p, delta, terms))
    }

    /// Support moduli and kinks of `x ↦ F(1 - x)` at an archimedean place,
    /// measured as `|x|` (real) or the ordinary modulus of `x` (complex).
    fn shifted_support(&self) -> ArchSupport {
        let complex = self.place == Place::Complex;
        let kinks = kinks(&self.test_function);
        let radius = kinks.iter().fold(0.0f64, |m, t| m.max(if complex { t.sqrt() } else { *t })) + 1.0;
        let mut points = Vec::new();
        for t in kinks {
            let t = if complex { t.sqrt() } else { t };
            points.extend([(1.0 - t).abs(), 1.0 + t]);
        }
        points.push(1.0);
        ArchSupport::compact(radius).with_breakpoints(points)
    }
}

/// Endpoints of every support interval inside `f`.
fn kinks(f: &TestFunction) -> Vec<f64> {
    match f {
        TestFunction::Bump { a, b } | TestFunction::Indicator { a, b } => vec![*a, *b],
        TestFunction::Zero => Vec::new(),
        TestFunction::Dilated { inner, lambda } => kinks(inner).into_iter().map(|t| t * lambda).collect(),
        TestFunction::Combination(parts) => parts.iter().flat_map(|(_, g)| kinks(g)).collect(),
    }
}

/// The two exact evaluations of a finite local term and their pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteWeilTerm {
    pub value: Complex64,
    /// `G(x ↦ F(1 - x))` on the Bruhat realization.
    pub convolution_path: Complex64,
    /// Sum of the three displayed pieces below.
    pub annulus_path: Complex64,
    /// `∫_{|u|=1} (F(1/u) - F(1)) d^×u/|1 - u|`.
    pub unit_circle: Complex64,
    /// `∫_{|u|≠1} F(1/u) d^×u/|1 - u|`.
    pub off_circle: Complex64,
    /// `-δ log q F(1)`.
    pub different: Complex64,
}

/// `γ q^{-δ/2}`, the multiplicative volume per unit of additive volume on
/// the unit sphere, times `q^{δ/2}`; equal to `log q / (1 - 1/q)`.
fn mult_density(p: u32) -> f64 {
    let q = p as f64;
    q.ln() / (1.0 - 1.0 / q)
}

/// `Σ w(u) d^×u / |1 - u|` over units `u ≢ 1 mod p^m`, with `w` a function
/// of `u mod p^m`.
fn unit_coset_sum(p: u32, m: u32, w: impl Fn(u64) -> Complex64) -> Complex64 {
    let q = p as f64;
    let modulus = (p as u64).pow(m);
    let cell = mult_density(p) * q.powi(-(m as i32));
    let mut acc = zero();
    for u in (2..modulus).filter(|u| u % p as u64 != 0) {
        let mut d = u - 1;
        let mut j = 0;
        while d % p as u64 == 0 {
            d /= p as u64;
            j += 1;
        }
        acc += w(u) * cell * q.powi(j);
    }
    acc
}

/// `∫_{|u|=1} (1 - χ(u)) d^×u/|1 - u|`, exactly `f log q`.
pub fn conductor_integral(chi: &LocalCharacter) -> f64 {
    let m = chi.conductor_exponent() + 1;
    let v = unit_coset_sum(chi.p(), m, |u| Complex64::new(1.0, 0.0) - chi.eval_parts(0, u));
    v.re
}

pub fn weil_term_finite(comp: &IdeleLocalComponent) -> Result<FiniteWeilTerm> {
    let chi = comp.local_character()?;
    let (p, delta) = (chi.p(), chi.delta());
    let q = p as f64;
    let f1 = comp.value_at_one();

    let one = PadicNumber::from_i64(p, 1)?;
    let shifted = comp.bruhat()?.reflect().translate(&one);
    let convolution_path = g_eval_finite(&shifted, OmegaTag::FiniteOmega1)?;

    // on |u| = 1, F(1/u) = f(1) χ(u)
    let m = chi.conductor_exponent() + 1;
    let unit_circle = unit_coset_sum(p, m, |u| f1 * (chi.eval_parts(0, u) - 1.0));
    // on |u| = q^{-j}, the shell average of χ is χ(p)^j times the mean of ψ
    let table = chi.unit_table();
    let mean: Complex64 =
        table.iter().flatten().map(|r| r.to_complex()).sum::<Complex64>() / table.iter().flatten().count() as f64;
    let mut off_circle = zero();
    for (k, value) in comp.finite_shells()? {
        let j = -k;
        if j == 0 {
            continue;
        }
        let weight = if j < 0 { q.powi(j) } else { 1.0 };
        off_circle += value * weight * q.ln() * chi.value_at_uniformizer().powi(j) * mean;
    }
    let different = Complex64::new(-(delta as f64) * q.ln() * f1, 0.0);
    let annulus_path = unit_circle + off_circle + different;
    Ok(FiniteWeilTerm {
        value: annulus_path,
        convolution_path,
        annulus_path,
        unit_circle,
        off_circle,
        different,
    })
}

/// `(G ∗ F)(1) = G(x ↦ F(1 - x))` at an archimedean place.
pub fn weil_term_convolution(comp: &IdeleLocalComponent, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<Complex64> {
    let support = comp.shifted_support();
    match comp.place {
        Place::Real => {
            let phi = |x: f64| comp.eval_real(1.0 - x);
            g_eval_arch(&ArchFunction::Real(&phi), &support, tag, cfg)
        }
        Place::Complex => {
            let phi = |z: Complex64| comp.eval_complex(1.0 - z);
            g_eval_arch(&ArchFunction::Complex(&phi), &support, tag, cfg)
        }
        Place::Finite { .. } => Err(Error::InvalidArgument("finite place; use weil_term_finite".into())),
    }
}

/// Archimedean local term.  At the real place the tagged expression in the
/// variable `u = 1/(1 - x)` is integrated directly; at the complex place the
/// convolution form is used.
pub fn weil_term_arch(comp: &IdeleLocalComponent, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<Complex64> {
    match comp.place {
        Place::Real => {
            let k = constants_for(&Place::Real, tag)?;
            let v = real_u_form(comp, tag, cfg)? + k.g_omega * comp.value_at_one();
            check_finite(v, "W_R")
        }
        Place::Complex => weil_term_convolution(comp, tag, cfg),
        Place::Finite { .. } => Err(Error::InvalidArgument("finite place; use weil_term_finite".into())),
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `∫_{R^×} (F(1/u) - ω(1 - 1/u) F(1)) du / (2|u||1 - u|)`.
fn real_u_form(comp: &IdeleLocalComponent, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<Complex64> {
    let Some((a, b)) = comp.test_function.support() else {
        return Ok(zero());
    };
    let f1 = comp.value_at_one();
    let big = |u: f64| comp.eval_real(1.0 / u);
    let measure = |u: f64| 1.0 / (2.0 * u.abs() * (1.0 - u).abs());
    // u-images of the kinks of f
    let mut kinks_u: Vec<f64> = kinks(&comp.test_function).into_iter().map(|t| 1.0 / t).collect();
    kinks_u.extend([1.0, 2.0]);
    let u_top = kinks_u.iter().fold(2.0f64, |m, x| m.max(*x)) + 1.0;
    let neg_kinks: Vec<f64> = kinks_u.iter().map(|x| -x).collect();

    match tag {
        OmegaTag::RealIndicator => {
            // ω(1 - 1/u) = 1 exactly for u ≥ 1/2
            let mut pts = vec![0.5, u_top];
            pts.extend(kinks_u.iter().filter(|&&x| x > 0.5 && x < u_top));
            let right = integrate_breakpoints(|u| (big(u) - f1) * measure(u), &sorted(pts), cfg)?;
            let tail = -f1 / 2.0 * (u_top / (u_top - 1.0)).ln();
            // F(1/u) = 0 unless 1/b ≤ |u| ≤ 1/a
            let mut left = zero();
            let lo = 1.0 / b;
            let hi = (1.0 / a).min(0.5);
            if lo < hi {
                let mut pts = vec![lo, hi];
                pts.extend(kinks_u.iter().filter(|&&x| x > lo && x < hi));
                left += integrate_breakpoints(|u| big(u) * measure(u), &sorted(pts), cfg)?;
            }
            let mut pts = vec![-1.0 / a, -1.0 / b];
            pts.extend(neg_kinks.iter().filter(|&&x| x > -1.0 / a && x < -1.0 / b));
            left += integrate_breakpoints(|u| big(u) * measure(u), &sorted(pts), cfg)?;
            Ok(right + tail + left)
        }
        OmegaTag::RealGaussian => {
            let omega = |u: f64| {
                let x = 1.0 - 1.0 / u;
                (-PI * x * x).exp()
            };
            let integrand = |u: f64| (big(u) - omega(u) * f1) * measure(u);
            let mut pts = vec![0.0, u_top];
            pts.extend(kinks_u.iter().filter(|&&x| x > 0.0 && x < u_top));
            let right = integrate_breakpoints(integrand, &sorted(pts), cfg)? + integrate_to_infinity(integrand, u_top, cfg)?;
            let mut pts = vec![-u_top, 0.0];
            pts.extend(neg_kinks.iter().filter(|&&x| x > -u_top && x < 0.0));
            let left = integrate_breakpoints(integrand, &sorted(pts), cfg)? + integrate_from_neg_infinity(integrand, -u_top, cfg)?;
            Ok(right + left)
        }
        OmegaTag::RealSinc | OmegaTag::RealSincSquared => {
            let squared = tag == OmegaTag::RealSincSquared;
            let omega = |u: f64| {
                let x = 1.0 - 1.0 / u;
                let s = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                if squared {
                    s * s
                } else {
                    s
                }
            };
            let integrand = |u: f64| (big(u) - omega(u) * f1) * measure(u);
            // |u| < u0 maps to |x| beyond an even integer; F(1/u) vanishes there
            let x_max = ((b + 1.0).max(20.0) / 2.0).ceil() * 2.0;
            let u0 = 1.0 / (x_max + 1.0);
            let n_half = (2.0 * (x_max + 1.0)).round() as usize;
            let mut pts: Vec<f64> = (2..=n_half).map(|j| 2.0 / j as f64).collect();
            pts.push(u_top);
            pts.extend(kinks_u.iter().filter(|&&x| x > u0 && x < u_top));
            let pos = sorted(pts);
            let neg = sorted(pos.iter().map(|x| -x).chain(neg_kinks.iter().copied().filter(|&x| x < -u0 && x > -u_top)).collect());
            let body = integrate_breakpoints(integrand, &pos, cfg)?
                + integrate_breakpoints(integrand, &neg, cfg)?
                + integrate_to_infinity(integrand, u_top, cfg)?
                + integrate_from_neg_infinity(integrand, -u_top, cfg)?;
            // u ∈ (0, u0) is x < -x_max; u ∈ (-u0, 0) is x > x_max + 2
            let tail = sinc_family_tail(squared, x_max) + sinc_family_tail(squared, x_max + 2.0);
            Ok(body - f1 * tail / 2.0)
        }
        _ => Err(Error::IncompatibleTag {
            tag: tag.to_string(),
            place: Place::Real.to_string(),
        }),
    }
}

fn sinc_family_tail(squared: bool, x: f64) -> f64 {
    if squared {
        sinc_squared_tail(x)
    } else {
        sinc_tail(x)
    }
}

/// `(1/2πi) ∫_{Re s = c} f̂(s) Λ_ν(χ, s) ds`, the spectral form of the
/// local term.
pub fn weil_term_spectral(comp: &IdeleLocalComponent, c: f64, cfg: &QuadratureConfig) -> Result<LineIntegral> {
    if comp.test_function.is_zero() {
        return Ok(LineIntegral {
            value: zero(),
            tail_bound: 0.0,
        });
    }
    let g = |s: Complex64| -> Complex64 {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let fhat = mellin(&comp.test_function, s, cfg).unwrap_or(nan);
        fhat * lambda_log_derivative(&comp.character, s).unwrap_or(nan)
    };
    vertical_line_integral(g, c, cfg)
}

/// `(G_ν ∗ F_ν^{(k)})(k)` with `F^{(k)}(x) = F(x/k)`, computed directly as
/// `G(x ↦ F(1 - x/k))`.
pub fn k_shift_term(comp: &IdeleLocalComponent, num: i64, den: i64, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<Complex64> {
    if num == 0 || den == 0 {
        return Err(Error::InvalidArgument("k must be a nonzero rational".into()));
    }
    let k = num as f64 / den as f64;
    match comp.place {
        Place::Finite { p, .. } => {
            let one = PadicNumber::from_i64(p, 1)?;
            let shifted = comp.bruhat()?.reflect().translate(&one);
            let t = PadicNumber::from_rational(p, den, num)?;
            g_eval_finite(&shifted.dilate(&t)?, tag)
        }
        Place::Real => {
            let base = comp.shifted_support();
            let support = scale_support(&base, k.abs());
            let phi = |x: f64| comp.eval_real(1.0 - x / k);
            g_eval_arch(&ArchFunction::Real(&phi), &support, tag, cfg)
        }
        Place::Complex => {
            let base = comp.shifted_support();
            let support = scale_support(&base, k.abs());
            let phi = |z: Complex64| comp.eval_complex(1.0 - z / k);
            g_eval_arch(&ArchFunction::Complex(&phi), &support, tag, cfg)
        }
    }
}

fn scale_support(s: &ArchSupport, k: f64) -> ArchSupport {
    ArchSupport {
        radius: s.radius.map(|r| r * k),
        breakpoints: s.breakpoints.iter().map(|x| x * k).collect(),
        spectral_radius: s.spectral_radius,
    }
}

// ---------------------------------------------------------------------------
// Operators on Bruhat functions

/// Fails unless `φ` vanishes near 0 and has zero integral over every sphere.
pub fn check_cuspidal(phi: &BruhatFunction) -> Result<()> {
    let scale = phi.max_abs_coefficient().max(1.0);
    for (v, integral) in phi.sphere_integrals()? {
        if integral.norm() > 1e-12 * scale {
            return Err(Error::NotCuspidal(format!(
                "nonzero unit average on |x| = p^{}",
                -v
            )));
        }
    }
    Ok(())
}

/// Removes the part of `φ` near 0 and every sphere average.
pub fn cuspidal_projection(phi: &BruhatFunction) -> BruhatFunction {
    let (p, delta) = (phi.p(), phi.delta());
    let kept: Vec<(Complex64, Ball)> = phi.terms().iter().filter(|(_, b)| !b.contains_zero()).cloned().collect();
    let away = BruhatFunction::from_terms(p, delta, kept);
    let q = p as f64;
    let mut correction = Vec::new();
    let integrals = away.sphere_integrals().expect("vanishes near 0");
    for (v, integral) in integrals {
        let volume = q.powf(-(delta as f64) / 2.0 - v as f64) * (1.0 - 1.0 / q);
        let mean = integral / volume;
        correction.push((-mean, Ball::around_zero(p, v)));
        correction.push((mean, Ball::around_zero(p, v + 1)));
    }
    away.add(&BruhatFunction::from_terms(p, delta, correction))
}

/// `A φ = log|x| · φ`; needs `φ` to vanish near 0.
pub fn operator_a(phi: &BruhatFunction) -> Result<BruhatFunction> {
    let lp = (phi.p() as f64).ln();
    let mut terms = Vec::with_capacity(phi.terms().len());
    for (c, b) in phi.terms() {
        let v = b
            .center()
            .valuation()
            .filter(|&v| v < b.radius_exp())
            .ok_or_else(|| Error::NotCuspidal("does not vanish near 0".into()))?;
        terms.push((c * (-(v as f64) * lp), b.clone()));
    }
    Ok(BruhatFunction::from_terms(phi.p(), phi.delta(), terms))
}

/// `B = F A F^{-1}`.
pub fn operator_b(phi: &BruhatFunction) -> Result<BruhatFunction> {
    let inv = phi.inverse_fourier()?;
    operator_a(&inv)
        .map_err(|_| Error::NotCuspidal("the Fourier transform does not vanish near 0".into()))?
        .fourier()
}

/// `R(u) φ = |u|^{1/2} φ(u x)`.
pub fn operator_r(phi: &BruhatFunction, u: &PadicNumber) -> Result<BruhatFunction> {
    Ok(phi.dilate(u)?.scale(Complex64::new(u.abs().sqrt(), 0.0)))
}

/// `I φ = φ(1/x) / |x|`; needs `φ` to vanish near 0.
pub fn operator_i(phi: &BruhatFunction) -> Result<BruhatFunction> {
    let p = phi.p();
    let mut terms = Vec::with_capacity(phi.terms().len());
    for (c, b) in phi.terms() {
        let v = b
            .center()
            .valuation()
            .filter(|&v| v < b.radius_exp())
            .ok_or_else(|| Error::NotCuspidal("does not vanish near 0".into()))?;
        let centre = b.center().inv()?;
        let abs_x = (p as f64).powi(v);
        terms.push((c / abs_x, Ball::new(&centre, b.radius_exp() - 2 * v)));
    }
    Ok(BruhatFunction::from_terms(p, phi.delta(), terms))
}

/// `H φ = A φ + B φ` on cuspidal `φ`.
pub fn conductor_operator_apply(phi: &BruhatFunction) -> Result<BruhatFunction> {
    check_cuspidal(phi)?;
    Ok(operator_a(phi)?.add(&operator_b(phi)?))
}

/// `χ(x) 1_{|x| = 1}`, an eigenfunction of `H` with eigenvalue `(f + δ) log q`.
pub fn unit_sphere_eigenfunction(chi: &LocalCharacter) -> Result<BruhatFunction> {
    let (p, f) = (chi.p(), chi.conductor_exponent().max(1));
    let modulus = (p as u64).pow(f);
    let mut terms = Vec::new();
    for u in (1..modulus).filter(|u| u % p as u64 != 0) {
        let centre = PadicNumber::from_i64(p, u as i64)?;
        terms.push((chi.eval_parts(0, u), Ball::new(&centre, f as i32)));
    }
    Ok(BruhatFunction::from_terms(p, chi.delta(), terms))
}

/// `Σ_ν log|k|_ν` as an exact integer combination of `log p`, keyed by `p`;
/// each place contributes its own map.
pub fn log_abs_exponents(place: &Place, num: i64, den: i64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let mut add = |n: i64, sign: i64| {
        for (p, e) in crate::characters::factorize(n.unsigned_abs()) {
            match place {
                Place::Finite { p: q, .. } if *q as u64 == p => *out.entry(p).or_insert(0) -= sign * e as i64,
                Place::Real => *out.entry(p).or_insert(0) += sign * e as i64,
                Place::Complex => *out.entry(p).or_insert(0) += 2 * sign * e as i64,
                _ => {}
            }
        }
    };
    add(num, 1);
    add(den, -1);
    out.retain(|_, e| *e != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RootOfUnity;
    use crate::test_functions::{bump_around, make_bump, make_indicator};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::with_tolerance(1e-11)
    }

    fn local(p: u32, delta: u32, f: u32, gens: &[(u64, i64, u64)]) -> LocalCharacter {
        let place = Place::finite_with_delta(p, delta).unwrap();
        let gens: Vec<(u64, RootOfUnity)> = gens.iter().map(|&(g, n, d)| (g, RootOfUnity::new(n, d).unwrap())).collect();
        LocalCharacter::from_generators(place, 0.0, f, &gens).unwrap()
    }

    fn quadratic5() -> LocalCharacter {
        local(5, 0, 1, &[(2, 2, 4)])
    }

    fn finite(f: TestFunction, chi: LocalCharacter) -> IdeleLocalComponent {
        IdeleLocalComponent::new(f, PlaceCharacter::Finite(chi))
    }

    #[test]
    fn conductor_examples() {
        let trivial = LocalCharacter::trivial(Place::finite(5).unwrap()).unwrap();
        assert_eq!(conductor_integral(&trivial), 0.0);
        assert_relative_eq!(conductor_integral(&quadratic5()), 5f64.ln(), epsilon = 1e-13);
        let mod8 = local(2, 0, 3, &[(7, 0, 1), (5, 1, 2)]);
        assert_relative_eq!(conductor_integral(&mod8), 3.0 * 2f64.ln(), epsilon = 1e-13);
    }

    #[test]
    fn finite_examples() {
        let p2 = LocalCharacter::trivial(Place::finite(2).unwrap()).unwrap();
        let t = weil_term_finite(&finite(make_bump(0.6, 1.5).unwrap(), p2.clone())).unwrap();
        assert_eq!(t.value.norm(), 0.0);
        assert_eq!(t.convolution_path.norm(), 0.0);

        let t = weil_term_finite(&finite(make_indicator(1.5, 2.5).unwrap(), p2)).unwrap();
        assert_relative_eq!(t.value.re, 2f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(t.convolution_path.re, 2f64.ln(), epsilon = 1e-13);
        assert_eq!(t.unit_circle.norm(), 0.0);

        let t = weil_term_finite(&finite(bump_around(1.0, 1.1).unwrap(), quadratic5())).unwrap();
        assert_relative_eq!(t.value.re, -5f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(t.convolution_path.re, -5f64.ln(), epsilon = 1e-12);
        assert!(t.off_circle.norm() < 1e-15);
    }

    #[test]
    fn finite_paths_agree() {
        let cases = [
            (make_bump(0.3, 5.0).unwrap(), local(2, 0, 0, &[])),
            (make_bump(0.1, 3.5).unwrap(), local(3, 1, 0, &[])),
            (make_bump(0.1, 30.0).unwrap(), local(5, 0, 1, &[(2, 1, 4)])),
            (make_bump(0.2, 9.0).unwrap(), local(2, 1, 2, &[(3, 1, 2)])),
            (make_bump(0.05, 4.0).unwrap(), local(3, 0, 2, &[(2, 1, 6)])),
        ];
        for (f, chi) in cases {
            let unramified = !chi.is_ramified();
            let t = weil_term_finite(&finite(f, chi)).unwrap();
            assert!((t.annulus_path - t.convolution_path).norm() < 1e-12, "{t:?}");
            if unramified {
                assert_eq!(t.unit_circle.norm(), 0.0);
            } else {
                assert!(t.off_circle.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unramified_twist_matches_spectral_form() {
        let mut chi = local(3, 1, 0, &[]);
        chi = LocalCharacter::unramified(chi.place(), 0.7).unwrap();
        let comp = finite(make_bump(0.1, 10.0).unwrap(), chi);
        let exact = weil_term_finite(&comp).unwrap();
        let spectral = weil_term_spectral(&comp, 0.5, &cfg()).unwrap();
        assert!((exact.value - spectral.value).norm() < 1e-8, "{exact:?} {spectral:?}");
    }

    #[test]
    fn real_tags_agree() {
        for odd in [false, true] {
            let comp = IdeleLocalComponent::new(make_bump(0.5, 2.0).unwrap(), PlaceCharacter::Real { odd });
            let values: Vec<Complex64> = OmegaTag::for_place(&Place::Real)
                .iter()
                .map(|t| weil_term_arch(&comp, *t, &cfg()).unwrap())
                .collect();
            for v in &values {
                assert!((v - values[0]).norm() < 1e-9, "{values:?}");
            }
            let conv = weil_term_convolution(&comp, OmegaTag::RealIndicator, &cfg()).unwrap();
            assert!((conv - values[0]).norm() < 1e-9);
            let spectral = weil_term_spectral(&comp, 0.5, &cfg()).unwrap();
            assert!((spectral.value - values[0]).norm() < 1e-8, "{spectral:?} {values:?}");
        }
        let comp = IdeleLocalComponent::new(make_bump(0.5, 2.0).unwrap(), PlaceCharacter::Real { odd: false });
        let w = weil_term_arch(&comp, OmegaTag::RealIndicator, &cfg()).unwrap();
        assert_relative_eq!(w.re, 1.6790020246853512, epsilon = 1e-9);
    }

    #[test]
    fn complex_matches_spectral_form() {
        for twist in [0, 1, -2] {
            let comp = IdeleLocalComponent::new(make_bump(0.5, 2.0).unwrap(), PlaceCharacter::Complex { twist });
            let a = weil_term_arch(&comp, OmegaTag::ComplexUnitDisc, &cfg()).unwrap();
            let b = weil_term_convolution(&comp, OmegaTag::ComplexGaussian, &cfg()).unwrap();
            let s = weil_term_spectral(&comp, 0.5, &cfg()).unwrap();
            assert!((a - b).norm() < 1e-9, "{a} {b}");
            // the spectral line integral is truncated; its reported tail bounds the gap
            assert!((a - s.value).norm() < s.tail_bound + 1e-9, "{twist}: {a} {s:?}");
        }
    }

    #[test]
    fn zero_function() {
        let comp = IdeleLocalComponent::new(TestFunction::Zero, PlaceCharacter::Real { odd: false });
        assert_eq!(weil_term_arch(&comp, OmegaTag::RealSinc, &cfg()).unwrap().norm(), 0.0);
    }

    #[test]
    fn k_shift_identity() {
        let f = make_bump(0.5, 2.0).unwrap();
        let comp = finite(f.clone(), local(2, 0, 0, &[]));
        let w = weil_term_finite(&comp).unwrap().value;
        let one = k_shift_term(&comp, 1, 1, OmegaTag::FiniteOmega1, &cfg()).unwrap();
        assert!((one - w).norm() < 1e-14);
        let two = k_shift_term(&comp, 2, 1, OmegaTag::FiniteOmega1, &cfg()).unwrap();
        assert_relative_eq!((two - w).re, -2f64.ln() * f.eval(1.0), epsilon = 1e-13);

        let real = IdeleLocalComponent::new(f.clone(), PlaceCharacter::Real { odd: false });
        let w = weil_term_arch(&real, OmegaTag::RealIndicator, &cfg()).unwrap();
        let two = k_shift_term(&real, 2, 1, OmegaTag::RealIndicator, &cfg()).unwrap();
        assert_relative_eq!((two - w).re, 2f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn log_abs_product_formula() {
        for (n, d) in [(2, 1), (3, 1), (6, 1), (1, 2), (-12, 35)] {
            let mut total: BTreeMap<u64, i64> = BTreeMap::new();
            let places = [Place::Real, Place::finite(2).unwrap(), Place::finite(3).unwrap(), Place::finite(5).unwrap(), Place::finite(7).unwrap()];
            for place in places {
                for (p, e) in log_abs_exponents(&place, n, d) {
                    *total.entry(p).or_insert(0) += e;
                }
            }
            assert!(total.values().all(|e| *e == 0), "{total:?}");
        }
    }

    fn eigen_case(p: u32, delta: u32, f: u32, gens: &[(u64, i64, u64)]) {
        let chi = local(p, delta, f, gens);
        let phi = unit_sphere_eigenfunction(&chi).unwrap();
        let h = conductor_operator_apply(&phi).unwrap();
        let lambda = (f + delta) as f64 * (p as f64).ln();
        let diff = h.sub(&phi.scale(Complex64::new(lambda, 0.0)));
        assert!(diff.max_abs_coefficient() < 1e-12, "p={p} f={f} δ={delta}: {diff:?}");
    }

    #[test]
    fn eigenfunctions() {
        eigen_case(5, 0, 1, &[(2, 2, 4)]);
        eigen_case(2, 0, 2, &[(3, 1, 2)]);
        eigen_case(2, 0, 3, &[(7, 0, 1), (5, 1, 2)]);
        eigen_case(3, 0, 2, &[(2, 1, 6)]);
        eigen_case(5, 1, 1, &[(2, 1, 4)]);
        eigen_case(3, 1, 2, &[(2, 1, 3)]);
    }

    #[test]
    fn not_cuspidal_is_rejected() {
        let ball = BruhatFunction::indicator(Ball::around_zero(3, 0), 0);
        assert!(matches!(conductor_operator_apply(&ball), Err(Error::NotCuspidal(_))));
        let unit = ball.sub(&BruhatFunction::indicator(Ball::around_zero(3, 1), 0));
        assert!(matches!(conductor_operator_apply(&unit), Err(Error::NotCuspidal(_))));
    }

    #[test]
    fn operator_relations_on_random_cuspidal_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u32, 3, 5] {
            for _ in 0..4 {
                let phi = cuspidal_projection(&crate::padic::random_bruhat(&mut rng, p, 0, 4, false));
                let psi = cuspidal_projection(&crate::padic::random_bruhat(&mut rng, p, 0, 4, false));
                if phi.is_zero() {
                    continue;
                }
                let h_phi = conductor_operator_apply(&phi).unwrap();
                // Fourier commutation
                let lhs = conductor_operator_apply(&phi.fourier().unwrap()).unwrap();
                let rhs = h_phi.fourier().unwrap();
                assert!(lhs.sub(&rhs).max_abs_coefficient() < 1e-10);
                // symmetry
                let a = h_phi.inner(&psi);
                let b = phi.inner(&conductor_operator_apply(&psi).unwrap());
                assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{a} {b}");
                // positivity
                assert!(h_phi.inner(&phi).re > 0.0);
                // R(u) for a unit u commutes with H
                let u = PadicNumber::from_i64(p, if p == 2 { 3 } else { 2 }).unwrap();
                let lhs = conductor_operator_apply(&operator_r(&phi, &u).unwrap()).unwrap();
                let rhs = operator_r(&h_phi, &u).unwrap();
                assert!(lhs.sub(&rhs).max_abs_coefficient() < 1e-10);
                // I A = -A I
                let ia = operator_i(&operator_a(&phi).unwrap()).unwrap();
                let ai = operator_a(&operator_i(&phi).unwrap()).unwrap();
                assert!(ia.add(&ai).max_abs_coefficient() < 1e-12);
            }
        }
    }
}
