//! Complex Gamma and digamma.
//!
//! Both use a shifted Stirling series (argument pushed to `Re >= 15`) and the
//! reflection formula on the left half-plane. Logarithms are used throughout so
//! that `|Im s|` up to several hundred neither overflows nor underflows.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, `γ_e = -Γ'(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_617_6;

// B_{2k} for k = 1..8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const SHIFT_TARGET: f64 = 15.0;

fn is_pole(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

fn stirling_ln_gamma(w: Complex64) -> Complex64 {
    let mut acc = (w - 0.5) * w.ln() - w + LN_SQRT_2PI;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        acc += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    acc
}

fn stirling_digamma(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = w.ln() - inv * 0.5;
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        acc -= pow * (b / (2.0 * k));
        pow *= inv2;
    }
    acc
}

fn shift_count(z: Complex64) -> usize {
    if z.re >= SHIFT_TARGET {
        0
    } else {
        (SHIFT_TARGET - z.re).ceil() as usize
    }
}

/// `ln sin(w)` on some branch, stable for large `|Im w|`.
fn ln_sin(w: Complex64) -> Complex64 {
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    if w.im > 0.0 {
        let i = Complex64::i();
        -i * w + Complex64::new(0.5f64.ln(), PI / 2.0) + (1.0 - (2.0 * i * w).exp()).ln()
    } else {
        ln_sin(w.conj()).conj()
    }
}

fn cot(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im >= 0.0 {
        let e = (2.0 * i * w).exp();
        i * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-2.0 * i * w).exp();
        i * (1.0 + e) / (1.0 - e)
    }
}

/// `ln Γ(s)` on an unspecified branch (only `exp` of the result is meaningful).
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if is_pole(s) {
        return Err(Error::GammaPole(s));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite(format!("Gamma argument {s}")));
    }
    if s.re < 0.5 {
        let w = Complex64::new(PI, 0.0) * s;
        let reflected = ln_gamma(1.0 - s)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin(w) - reflected);
    }
    let n = shift_count(s);
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 0..n {
        prod *= s + k as f64;
    }
    Ok(stirling_ln_gamma(s + n as f64) - prod.ln())
}

/// Classical `Γ(s)`.
pub fn gamma(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(s)?.exp())
}

/// Digamma `ψ(s) = Γ'(s)/Γ(s)`.
pub fn digamma(s: Complex64) -> Result<Complex64> {
    if is_pole(s) {
        return Err(Error::GammaPole(s));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite(format!("digamma argument {s}")));
    }
    if s.re < 0.5 {
        return Ok(digamma(1.0 - s)? - PI * cot(PI * s));
    }
    let n = shift_count(s);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += (s + k as f64).inv();
    }
    Ok(stirling_digamma(s + n as f64) - acc)
}

/// `(Γ(s), ψ(s))` in one call.
pub fn complex_gamma_digamma(s: Complex64) -> Result<(Complex64, Complex64)> {
    Ok((gamma(s)?, digamma(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Independent oracle: Lanczos approximation, g = 7, n = 9.
    fn lanczos_gamma(z: Complex64) -> Complex64 {
        const G: f64 = 7.0;
        const P: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if z.re < 0.5 {
            return PI / ((PI * z).sin() * lanczos_gamma(1.0 - z));
        }
        let z = z - 1.0;
        let mut x = Complex64::new(P[0], 0.0);
        for (i, p) in P.iter().enumerate().skip(1) {
            x += *p / (z + i as f64);
        }
        let t = z + G + 0.5;
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_one_and_half() {
        let (g, d) = complex_gamma_digamma(c(1.0, 0.0)).unwrap();
        assert!((g - 1.0).norm() < 1e-14);
        assert!((d.re + EULER_GAMMA).abs() < 1e-14 && d.im.abs() < 1e-15);
        let h = gamma(c(0.5, 0.0)).unwrap();
        assert!((h.re - PI.sqrt()).abs() < 1e-14);
        assert!((h.re - 1.772_453_851).abs() < 1e-9);
    }

    #[test]
    fn matches_lanczos_oracle() {
        for &re in &[-4.3, -0.7, 0.2, 0.5, 1.3, 3.7, 9.1] {
            for &im in &[-25.0, -3.0, 0.4, 1.0, 7.5, 25.0] {
                let s = c(re, im);
                let r = rel(gamma(s).unwrap(), lanczos_gamma(s));
                assert!(r < 1e-12, "s = {s}: rel {r:e}");
            }
        }
    }

    #[test]
    fn digamma_matches_finite_difference() {
        for &s in &[c(0.3, 2.0), c(2.5, -7.0), c(-3.4, 0.8), c(0.5, 14.13)] {
            let h = 1e-5;
            let fd = (ln_gamma_continuous(s + h) - ln_gamma_continuous(s - h)) / (2.0 * h);
            let d = digamma(s).unwrap();
            assert!((fd - d).norm() < 1e-8, "{s}: {fd} vs {d}");
        }
    }

    fn ln_gamma_continuous(s: Complex64) -> Complex64 {
        lanczos_gamma(s).ln()
    }

    #[test]
    fn recurrence_on_strip() {
        for i in 0..10 {
            for j in 0..10 {
                let s = c(-9.95 + 2.0 * i as f64 + 0.013 * j as f64, -300.0 + 66.6 * j as f64);
                let lhs = gamma(s + 1.0).unwrap();
                let rhs = s * gamma(s).unwrap();
                assert!(rel(lhs, rhs) < 1e-12, "s = {s}: {:e}", rel(lhs, rhs));
            }
        }
    }

    #[test]
    fn reflection() {
        for &s in &[c(0.3, 0.0), c(0.25, 3.0), c(-2.5, 1.5), c(4.2, -9.0)] {
            let v = gamma(s).unwrap() * gamma(1.0 - s).unwrap() * (PI * s).sin() / PI;
            assert!((v - 1.0).norm() < 1e-10, "{s}: {v}");
        }
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(gamma(c(0.0, 0.0)), Err(Error::GammaPole(_))));
        assert!(matches!(digamma(c(-3.0, 0.0)), Err(Error::GammaPole(_))));
        assert!(gamma(c(-3.0, 1e-9)).is_ok());
    }
}
