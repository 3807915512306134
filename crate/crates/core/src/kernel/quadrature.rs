//! Adaptive Gauss–Kronrod (7/15) quadrature over finite and semi-infinite
//! ranges.
//!
//! Panels are refined one at a time, always splitting the panel with the
//! largest error estimate (ties broken by creation order), and the final sum is
//! taken over panels sorted by their left endpoint. Equal inputs therefore
//! produce bit-identical outputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub absolute_tolerance: f64,
    pub relative_tolerance: f64,
    pub max_subdivisions: usize,
    /// Height at which infinite vertical lines are cut off.
    pub truncation_height: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            absolute_tolerance: 1e-10,
            relative_tolerance: 1e-10,
            max_subdivisions: 1_000_000,
            truncation_height: 400.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            absolute_tolerance: tol,
            relative_tolerance: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.absolute_tolerance > 0.0 && self.relative_tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature tolerances must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument("max_subdivisions must be >= 1".into()));
        }
        if !(self.truncation_height > 0.0 && self.truncation_height.is_finite()) {
            return Err(Error::InvalidArgument("truncation_height must be positive".into()));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn kronrod<F>(f: &F, a: f64, b: f64, seq: usize) -> Result<Panel>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        res_asc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let value = res_k * half;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(format!(
            "integrand on [{a}, {b}] produced {value}"
        )));
    }
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * res_abs;
    if round > error {
        error = round;
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        seq,
    })
}

/// Integrates `f` over `[a, b]`.
///
/// Endpoint singularities are allowed (the integrand is never evaluated at
/// a panel endpoint); interior singular points must be passed as breakpoints
/// through [`integrate_breakpoints`].
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate_breakpoints(f, &[a, b], cfg)
}

/// Real-valued convenience wrapper around [`integrate_adaptive`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Ok(integrate_adaptive(|x| Complex64::new(f(x), 0.0), a, b, cfg)?.re)
}

/// Integrates over the union of consecutive intervals `[p_i, p_{i+1}]`.
/// The points must be non-decreasing; zero-length pieces are skipped.
pub fn integrate_breakpoints<F>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    if points.len() < 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "finite limits required, got [{a}, {b}]"
            )));
        }
        if b < a {
            return Err(Error::InvalidArgument("breakpoints must be non-decreasing".into()));
        }
        if b == a {
            continue;
        }
        heap.push(kronrod(&f, a, b, seq)?);
        seq += 1;
    }
    if heap.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut subdivisions = 0usize;
    let mut frozen: Vec<Panel> = Vec::new();
    // running sums, re-totalled exactly before accepting
    let (mut total, mut err) = totals(heap.iter());
    loop {
        let target = cfg.absolute_tolerance.max(cfg.relative_tolerance * total.norm());
        if err <= target {
            (total, err) = totals(heap.iter().chain(frozen.iter()));
            let target = cfg.absolute_tolerance.max(cfg.relative_tolerance * total.norm());
            if err <= target {
                return Ok(ordered_sum(heap.into_iter().chain(frozen)));
            }
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                (total, err) = totals(frozen.iter());
                return Err(Error::NonConvergence {
                    estimate: total,
                    error: err,
                    subdivisions,
                })
            }
        };
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            return Err(Error::NonConvergence {
                estimate: total,
                error: err,
                subdivisions,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(1e-300) {
            frozen.push(worst);
            continue;
        }
        let left = kronrod(&f, worst.a, mid, seq)?;
        let right = kronrod(&f, mid, worst.b, seq + 1)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        seq += 2;
        subdivisions += 1;
    }
}

fn totals<'a>(panels: impl Iterator<Item = &'a Panel>) -> (Complex64, f64) {
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in panels {
        total += p.value;
        err += p.error;
    }
    (total, err)
}

fn ordered_sum(panels: impl Iterator<Item = Panel>) -> Complex64 {
    let mut v: Vec<Panel> = panels.collect();
    v.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
    v.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value)
}

/// Integrates `f` over `[a, ∞)` through the substitution `x = a + (1 - t)/t`.
pub fn integrate_to_infinity<F>(f: F, a: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate_adaptive(
        |t| {
            let x = a + (1.0 - t) / t;
            f(x) / (t * t)
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Integrates `f` over `(-∞, b]`.
pub fn integrate_from_neg_infinity<F>(f: F, b: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    integrate_to_infinity(|x| f(-x), -b, cfg)
}
