//! Global assembly over Q: the zero side from an ingested zero table plus
//! the poles of the completed zeta function, the prime side as a sum of
//! local terms, and a verification report.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{factorize, localize_dirichlet, DirichletCharacter};
use crate::error::{Error, Result};
use crate::gamma_factors::gamma_factor;
use crate::kernel::{integrate_breakpoints, vertical_line_integral, QuadratureConfig};
use crate::log_fourier::OmegaTag;
use crate::padic::{Place, PlaceCharacter};
use crate::test_functions::{mellin, TestFunction};
use crate::weil_local::{weil_term_arch, weil_term_finite, IdeleLocalComponent};

/// Ordinates `γ` of zeros `1/2 + iγ` of one L-function; conjugates implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroTable {
    /// Distinct ordinates, strictly increasing and positive.
    pub ordinates: Vec<f64>,
    /// Number of times each ordinate was listed.
    pub multiplicities: Vec<u32>,
    pub l_function_label: String,
    /// The table's comment lines.
    pub provenance: String,
    pub max_height: f64,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Parses `#` comments and positive ordinates separated by whitespace
    /// or commas.  Repeated ordinates raise the multiplicity.
    pub fn parse(text: &str, label: &str) -> Result<Self> {
        let mut ordinates: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<u32> = Vec::new();
        let mut provenance = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let (body, comment) = match raw.find('#') {
                Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
                None => (raw, None),
            };
            if let Some(c) = comment {
                provenance.push(c.to_string());
            }
            for token in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let value: f64 = token.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("not a number: {token:?}"),
                })?;
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("ordinate must be positive, got {value}"),
                    });
                }
                match ordinates.last() {
                    Some(&last) if value == last => *multiplicities.last_mut().expect("paired") += 1,
                    Some(&last) if value < last => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("ordinates must ascend: {value} after {last}"),
                        })
                    }
                    _ => {
                        ordinates.push(value);
                        multiplicities.push(1);
                    }
                }
            }
        }
        let max_height = ordinates.last().copied().unwrap_or(0.0);
        Ok(Self {
            ordinates,
            multiplicities,
            l_function_label: label.to_string(),
            provenance: provenance.join("\n"),
            max_height,
        })
    }
}

pub fn load_zeros(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    ZeroTable::parse(&text, &label)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroSide {
    pub value: Complex64,
    /// `f̂(0) + f̂(1)` for the trivial character, else 0.
    pub poles: Complex64,
    /// `-m_k (f̂(1/2 + iγ_k) + f̂(1/2 - iγ_k))` in table order.
    pub terms: Vec<Complex64>,
    pub zeros_used: usize,
    pub warnings: Vec<String>,
}

fn require_real(chi: &DirichletCharacter) -> Result<()> {
    let real = (0..chi.modulus() as i64).all(|n| chi.value(n).im.abs() < 1e-12);
    if real {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "zero tables list positive ordinates only, which describes L-functions of real characters".into(),
        ))
    }
}

/// `Z(F)`: poles counted positively, zeros negatively.
pub fn zero_side(f: &TestFunction, chi: &DirichletCharacter, zeros: &ZeroTable, max_zeros: usize, cfg: &QuadratureConfig) -> Result<ZeroSide> {
    require_real(chi)?;
    let mut warnings = Vec::new();
    let used = if max_zeros > zeros.len() {
        warnings.push(format!("maxZeros = {max_zeros} exceeds the table length {}; clamped", zeros.len()));
        zeros.len()
    } else {
        max_zeros
    };
    let poles = if chi.is_trivial() {
        mellin(f, Complex64::new(0.0, 0.0), cfg)? + mellin(f, Complex64::new(1.0, 0.0), cfg)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut terms = Vec::with_capacity(used);
    for (g, m) in zeros.ordinates.iter().zip(&zeros.multiplicities).take(used) {
        let up = mellin(f, Complex64::new(0.5, *g), cfg)?;
        let down = mellin(f, Complex64::new(0.5, -g), cfg)?;
        terms.push(-(*m as f64) * (up + down));
    }
    let value = poles + terms.iter().sum::<Complex64>();
    Ok(ZeroSide {
        value,
        poles,
        terms,
        zeros_used: used,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaceTerm {
    pub place: Place,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrimeSide {
    pub value: Complex64,
    pub terms: Vec<PlaceTerm>,
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| factorize(k).len() == 1 && factorize(k)[0].1 == 1).collect()
}

/// Finite places that can contribute: primes `p` with `p^{±k}` in the support
/// for some `k ≥ 1`, and the primes dividing the conductor.
pub fn contributing_primes(f: &TestFunction, chi: &DirichletCharacter) -> Vec<u64> {
    let mut primes: Vec<u64> = match f.support() {
        Some((a, b)) => primes_up_to(b.max(1.0 / a).floor() as u64),
        None => Vec::new(),
    };
    for (p, _) in factorize(chi.conductor()) {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    primes
}

/// `W(F) = Σ_ν W_ν(F)`, in the order real place, then primes ascending.
pub fn prime_side(f: &TestFunction, chi: &DirichletCharacter, tag: OmegaTag, cfg: &QuadratureConfig) -> Result<PrimeSide> {
    let mut terms = Vec::new();
    let real = IdeleLocalComponent::new(f.clone(), localize_dirichlet(chi, Place::Real)?);
    terms.push(PlaceTerm {
        place: Place::Real,
        value: weil_term_arch(&real, tag, cfg)?,
    });
    for p in contributing_primes(f, chi) {
        let place = Place::finite(p as u32)?;
        let comp = IdeleLocalComponent::new(f.clone(), localize_dirichlet(chi, place)?);
        terms.push(PlaceTerm {
            place,
            value: weil_term_finite(&comp)?.value,
        });
    }
    let value = terms.iter().map(|t| t.value).sum();
    Ok(PrimeSide { value, terms })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EfConfigEcho {
    pub test_function: String,
    pub character_modulus: u64,
    pub zero_table: String,
    pub max_zeros: usize,
    pub regularization: OmegaTag,
    pub absolute_tolerance: f64,
    pub relative_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EfReport {
    pub zero_side: f64,
    pub prime_side: f64,
    pub residual: f64,
    pub tail_bound: f64,
    /// Effect on the zero side of a 1e-9 error in every table ordinate.
    pub sensitivity: f64,
    pub zeros_used: usize,
    pub places_used: Vec<String>,
    pub local_terms: Vec<PlaceTerm>,
    pub zero_terms: Vec<f64>,
    pub imaginary_parts: [f64; 2],
    pub warnings: Vec<String>,
    pub config: EfConfigEcho,
}

impl EfReport {
    pub fn passed(&self) -> bool {
        self.residual <= self.tail_bound
    }
}

const BLOCK: usize = 10;

/// Bound on the omitted zeros from the decay of the last two blocks of
/// increments: a geometric tail with the observed block ratio, or a
/// conservative ratio of 0.95 when the decay is not established.
pub fn tail_estimate(terms: &[f64]) -> f64 {
    let n = terms.len();
    if n == 0 {
        return 0.0;
    }
    let block_max = |lo: usize, hi: usize| terms[lo..hi].iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let last = block_max(n.saturating_sub(BLOCK), n);
    let ratio = if n >= 2 * BLOCK {
        let prev = block_max(n - 2 * BLOCK, n - BLOCK);
        if prev > 0.0 {
            last / prev
        } else {
            1.0
        }
    } else {
        1.0
    };
    let r = if ratio < 0.95 { ratio } else { 0.95 };
    BLOCK as f64 * last * r / (1.0 - r)
}

pub fn verify_explicit_formula(
    f: &TestFunction,
    chi: &DirichletCharacter,
    zeros: &ZeroTable,
    max_zeros: usize,
    tag: OmegaTag,
    cfg: &QuadratureConfig,
) -> Result<EfReport> {
    let z = zero_side(f, chi, zeros, max_zeros, cfg)?;
    let w = prime_side(f, chi, tag, cfg)?;
    let zero_terms: Vec<f64> = z.terms.iter().map(|t| t.re).collect();
    let residual = (z.value - w.value).norm();
    let quadrature_floor =
        (2 * z.zeros_used + 2 + w.terms.len()) as f64 * cfg.absolute_tolerance.max(cfg.relative_tolerance * w.value.norm());
    let tail_bound = tail_estimate(&zero_terms) + quadrature_floor;

    let h = 1e-4;
    let mut sensitivity = 0.0;
    for g in zeros.ordinates.iter().take(z.zeros_used) {
        let d = (mellin(f, Complex64::new(0.5, g + h), cfg)? - mellin(f, Complex64::new(0.5, g - h), cfg)?) / (2.0 * h);
        sensitivity += 2.0 * d.norm() * 1e-9;
    }
    Ok(EfReport {
        zero_side: z.value.re,
        prime_side: w.value.re,
        residual,
        tail_bound,
        sensitivity,
        zeros_used: z.zeros_used,
        places_used: w.terms.iter().map(|t| t.place.to_string()).collect(),
        local_terms: w.terms,
        zero_terms,
        imaginary_parts: [z.value.im, w.value.im],
        warnings: z.warnings,
        config: EfConfigEcho {
            test_function: f.to_string(),
            character_modulus: chi.modulus(),
            zero_table: zeros.l_function_label.clone(),
            max_zeros,
            regularization: tag,
            absolute_tolerance: cfg.absolute_tolerance,
            relative_tolerance: cfg.relative_tolerance,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InversionCheck {
    pub x: f64,
    /// `(1/2πi) ∫ f̂(s) χ(x)|x|^{s-1} / Γ(χ, s) ds`.
    pub contour: Complex64,
    /// `F^{-1}(χ^{-1}(y) f(|y|))(x)` by direct quadrature.
    pub direct: Complex64,
    pub tail_bound: f64,
}

/// Checks the real-place inversion lemma at `x ≠ 0`.
pub fn inversion_lemma_real(f: &TestFunction, odd: bool, x: f64, c: f64, cfg: &QuadratureConfig) -> Result<InversionCheck> {
    if x == 0.0 {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    let chi = PlaceCharacter::Real { odd };
    let sign = if odd { x.signum() } else { 1.0 };
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let line = vertical_line_integral(
        |s| {
            let fhat = mellin(f, s, cfg).unwrap_or(nan);
            let g = gamma_factor(&chi, s).map(|g| g.value).unwrap_or(nan);
            fhat * sign * Complex64::new(x.abs(), 0.0).powc(s - 1.0) / g
        },
        c,
        cfg,
    )?;
    let direct = match f.support() {
        None => Complex64::new(0.0, 0.0),
        Some((a, b)) => {
            // F^{-1}g(x) = ∫ g(y) e^{2πixy} dy, with g(y) = χ(y) f(|y|)
            let period = 1.0 / (2.0 * x.abs());
            let n = ((b - a) / period).ceil().max(1.0) as usize * 4;
            let pts: Vec<f64> = (0..=n).map(|j| a + (b - a) * j as f64 / n as f64).collect();
            let w = 2.0 * std::f64::consts::PI * x;
            
            integrate_breakpoints(
                |y| {
                    let v = f.eval(y);
                    if odd {
                        Complex64::new(0.0, 2.0 * v * (w * y).sin())
                    } else {
                        Complex64::new(2.0 * v * (w * y).cos(), 0.0)
                    }
                },
                &pts,
                cfg,
            )?
        }
    };
    Ok(InversionCheck {
        x,
        contour: line.value,
        direct,
        tail_bound: line.tail_bound,
    })
}
