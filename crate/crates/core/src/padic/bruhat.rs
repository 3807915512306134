//! Bruhat functions on Q_p: finite linear combinations of ball indicators,
//! kept in a canonical form of pairwise-disjoint balls.
//!
//! Measures follow the self-dual normalisation for the additive character
//! `λ(x) = exp(2πi {p^δ x})`: `vol(Z_p) = p^(-δ/2)`. With `δ = 0` this is the
//! usual character of Q_p.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::number::PadicNumber;
use crate::error::{Error, Result};

/// Largest number of sub-balls a single Fourier expansion may produce.
pub const MAX_EXPANSION: u128 = 1 << 22;

/// Relative size below which canonical coefficients are treated as zero.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// The ball `{x : |x - centre| <= p^(-radius_exp)}`, with the centre reduced
/// modulo `p^radius_exp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    radius_exp: i32,
    center: PadicNumber,
}

impl Ball {
    pub fn new(center: &PadicNumber, radius_exp: i32) -> Self {
        let center = center.truncate_below(radius_exp);
        if let Some(v) = center.valuation() {
            assert!(
                ((radius_exp - v) as usize) <= center.precision(),
                "ball depth {} exceeds working precision {}",
                radius_exp - v,
                center.precision()
            );
        }
        Self { radius_exp, center }
    }

    /// `p^n Z_p`.
    pub fn around_zero(p: u32, radius_exp: i32) -> Self {
        Self {
            radius_exp,
            center: PadicNumber::zero(p),
        }
    }

    pub fn radius_exp(&self) -> i32 {
        self.radius_exp
    }

    pub fn center(&self) -> &PadicNumber {
        &self.center
    }

    pub fn p(&self) -> u32 {
        self.center.p()
    }

    pub fn contains(&self, x: &PadicNumber) -> bool {
        x.agrees_below(&self.center, self.radius_exp)
    }

    pub fn contains_zero(&self) -> bool {
        self.center.is_zero()
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        other.radius_exp >= self.radius_exp && self.contains(&other.center)
    }

    /// Additive Haar volume `p^(-δ/2 - n)`.
    pub fn volume(&self, delta: u32) -> f64 {
        (self.p() as f64).powf(-(delta as f64) / 2.0 - self.radius_exp as f64)
    }

    /// The enclosing ball at radius exponent `m <= n`.
    pub fn ancestor(&self, m: i32) -> Ball {
        debug_assert!(m <= self.radius_exp);
        Ball {
            radius_exp: m,
            center: self.center.truncate_below(m),
        }
    }

    pub fn child(&self, digit: u32) -> Ball {
        let p = self.p();
        let step = PadicNumber::from_digits(p, self.radius_exp, &[digit]).expect("digit < p");
        Ball::new(&self.center.add(&step), self.radius_exp + 1)
    }

    /// `|x|` for `x` in the ball, when it does not contain 0.
    pub fn abs_value(&self) -> Option<f64> {
        self.center.valuation().map(|_| self.center.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruhatFunction {
    p: u32,
    delta: u32,
    terms: Vec<(Complex64, Ball)>,
}

fn is_negligible(c: Complex64, tol: f64) -> bool {
    c.norm() <= tol
}

impl BruhatFunction {
    pub fn zero(p: u32, delta: u32) -> Self {
        Self {
            p,
            delta,
            terms: Vec::new(),
        }
    }

    /// Builds and canonicalises a function from arbitrary (possibly nested)
    /// terms.
    pub fn from_terms(p: u32, delta: u32, terms: Vec<(Complex64, Ball)>) -> Self {
        assert!(terms.iter().all(|(_, b)| b.p() == p), "mixed primes");
        Self {
            p,
            delta,
            terms: canonicalize_terms(p, terms, COEFFICIENT_TOLERANCE),
        }
    }

    /// Keeps `terms` as given; they must be pairwise disjoint.
    #[cfg(test)]
    pub(crate) fn from_raw_terms(p: u32, delta: u32, terms: Vec<(Complex64, Ball)>) -> Self {
        Self { p, delta, terms }
    }

    pub fn indicator(ball: Ball, delta: u32) -> Self {
        let p = ball.p();
        Self::from_terms(p, delta, vec![(Complex64::new(1.0, 0.0), ball)])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Canonical terms: disjoint balls, nonzero coefficients, sorted.
    pub fn terms(&self) -> &[(Complex64, Ball)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_space(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed primes");
        assert_eq!(self.delta, other.delta, "mixed differential exponents");
    }

    pub fn eval(&self, x: &PadicNumber) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, b)| b.contains(x))
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, b)| b.contains_zero())
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_space(other);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.p, self.delta, terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (a * c, b.clone())).collect();
        Self::from_terms(self.p, self.delta, terms)
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(a, b)| (a.conj(), b.clone())).collect(),
            ..self.clone()
        }
    }

    /// Applies `g` to every coefficient of the canonical form.
    pub fn map_coefficients(&self, g: impl Fn(Complex64, &Ball) -> Complex64) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (g(*a, b), b.clone())).collect();
        Self::from_terms(self.p, self.delta, terms)
    }

    /// `x ↦ φ(x - a)`.
    pub fn translate(&self, a: &PadicNumber) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, b)| (*c, Ball::new(&b.center.add(a), b.radius_exp)))
            .collect();
        Self::from_terms(self.p, self.delta, terms)
    }

    /// `x ↦ φ(-x)`.
    pub fn reflect(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, b)| (*c, Ball::new(&b.center.neg(), b.radius_exp)))
            .collect();
        Self::from_terms(self.p, self.delta, terms)
    }

    /// `x ↦ φ(t x)` for `t ≠ 0`.
    pub fn dilate(&self, t: &PadicNumber) -> Result<Self> {
        let t_inv = t.inv()?;
        let v = t.valuation().expect("nonzero");
        let terms = self
            .terms
            .iter()
            .map(|(c, b)| (*c, Ball::new(&b.center.mul(&t_inv), b.radius_exp - v)))
            .collect();
        Ok(Self::from_terms(self.p, self.delta, terms))
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        self.same_space(other);
        let mut index: HashMap<&Ball, Complex64> = HashMap::new();
        let mut other_levels = BTreeSet::new();
        for (c, b) in &other.terms {
            index.insert(b, *c);
            other_levels.insert(b.radius_exp);
        }
        let own_levels: BTreeSet<i32> = self.terms.iter().map(|(_, b)| b.radius_exp).collect();
        // other balls indexed by their ancestor at each of our (strictly coarser) levels
        let mut below: HashMap<Ball, Vec<usize>> = HashMap::new();
        for (i, (_, b)) in other.terms.iter().enumerate() {
            for &m in own_levels.range(..b.radius_exp) {
                below.entry(b.ancestor(m)).or_default().push(i);
            }
        }
        let mut terms = Vec::new();
        for (c, a) in &self.terms {
            for &m in other_levels.range(..=a.radius_exp) {
                let anc = a.ancestor(m);
                if let Some(d) = index.get(&anc) {
                    terms.push((c * d, a.clone()));
                }
            }
            if let Some(list) = below.get(a) {
                for &i in list {
                    let (d, b) = &other.terms[i];
                    terms.push((c * d, b.clone()));
                }
            }
        }
        Self::from_terms(self.p, self.delta, terms)
    }

    /// `∫ φ dx` for the self-dual additive measure.
    pub fn integrate(&self) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, (c, b)| acc + c * b.volume(self.delta))
    }

    /// `∫ φ(x) dx / |x|`; diverges unless φ vanishes near 0.
    pub fn integrate_dx_over_abs(&self) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, b) in &self.terms {
            match b.abs_value() {
                Some(a) => acc += c * b.volume(self.delta) / a,
                None => {
                    return Err(Error::Divergent(format!(
                        "function takes the value {c} on a neighbourhood of 0"
                    )))
                }
            }
        }
        Ok(acc)
    }

    /// `⟨φ, ψ⟩ = ∫ φ conj(ψ) dx`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.product(&other.conj()).integrate()
    }

    /// Additive Fourier transform `φ̃(y) = ∫ φ(x) λ(xy) dx`.
    ///
    /// Uses whichever of the ball-by-ball expansion and a DFT over the
    /// finite grid `p^V Z_p / p^N Z_p` spanned by the support needs fewer
    /// pieces.
    pub fn fourier(&self) -> Result<Self> {
        if self.terms.is_empty() {
            return Ok(self.clone());
        }
        let (lo, hi) = self.grid_bounds();
        let grid = (self.p as u128).checked_pow((hi - lo) as u32).unwrap_or(u128::MAX);
        let per_ball: u128 = self
            .terms
            .iter()
            .map(|(_, b)| match b.center.valuation() {
                Some(v) => (self.p as u128).checked_pow((b.radius_exp - v) as u32).unwrap_or(u128::MAX),
                None => 1,
            })
            .fold(0u128, |a, b| a.saturating_add(b));
        if per_ball <= grid {
            self.fourier_by_balls()
        } else {
            self.fourier_on_grid()
        }
    }

    /// `(V, N)`: the support lies in `p^V Z_p` and φ is constant on cosets of
    /// `p^N Z_p`.
    fn grid_bounds(&self) -> (i32, i32) {
        let lo = self
            .terms
            .iter()
            .map(|(_, b)| b.center.valuation().map_or(b.radius_exp, |v| v.min(b.radius_exp)))
            .min()
            .expect("nonempty");
        let hi = self.terms.iter().map(|(_, b)| b.radius_exp).max().expect("nonempty");
        (lo, hi)
    }

    /// Closed form per ball: `1_{B(c,n)}` maps to `p^(-δ/2-n) λ(c y) 1_{|y| <= p^(n+δ)}`,
    /// expanded on the sub-balls where the phase is constant.
    pub fn fourier_by_balls(&self) -> Result<Self> {
        let p = self.p;
        let delta = self.delta as i32;
        let mut out = Vec::new();
        for (a, ball) in &self.terms {
            let n = ball.radius_exp;
            let scale = (p as f64).powf(-(delta as f64) / 2.0 - n as f64);
            let level = -n - delta;
            let v = match ball.center.valuation() {
                None => {
                    out.push((a * scale, Ball::around_zero(p, level)));
                    continue;
                }
                Some(v) => v,
            };
            // phase is constant on balls of radius exponent -v - δ
            let depth = (n - v) as u32;
            let modulus = expansion_size(p, depth)?;
            let c_int = ball.center.residue(v, n);
            for y in 0..modulus {
                let k = (c_int * y) % modulus;
                let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / modulus as f64);
                let digits = base_p_digits(y, p, depth);
                let y0 = PadicNumber::from_digits(p, level, &digits)?;
                out.push((a * scale * phase, Ball::new(&y0, level + depth as i32)));
            }
        }
        Ok(Self::from_terms(p, self.delta, out))
    }

    /// Writing `x = p^V X` and `y = p^(-N-δ) Y` with `X, Y mod p^(N-V)`, the
    /// transform is the length-`p^(N-V)` DFT `Σ_X φ(X) e(XY / p^(N-V))`
    /// times the cell volume.
    pub fn fourier_on_grid(&self) -> Result<Self> {
        let p = self.p;
        let (lo, hi) = self.grid_bounds();
        let depth = (hi - lo) as u32;
        let size = expansion_size(p, depth)? as usize;
        let mut values = vec![Complex64::new(0.0, 0.0); size];
        for (c, b) in &self.terms {
            let fixed = (b.radius_exp - lo) as u32;
            let stride = (p as usize).pow(fixed);
            let start = b.center.residue(lo, b.radius_exp) as usize;
            let mut i = start;
            while i < size {
                values[i] += c;
                i += stride;
            }
        }
        // digit order: index X = Σ d_j p^j with d_j the digit at position lo + j
        let mut planner = rustfft::FftPlanner::<f64>::new();
        planner.plan_fft_inverse(size).process(&mut values);
        let vol = (p as f64).powf(-(self.delta as f64) / 2.0 - hi as f64);
        let level = -hi - self.delta as i32;
        let mut out = Vec::with_capacity(size);
        for (y, val) in values.into_iter().enumerate() {
            let digits = base_p_digits(y as u128, p, depth);
            let y0 = PadicNumber::from_digits(p, level, &digits)?;
            out.push((val * vol, Ball::new(&y0, level + depth as i32)));
        }
        Ok(Self::from_terms(p, self.delta, out))
    }

    /// `F^{-1} φ (x) = F φ(-x)`.
    pub fn inverse_fourier(&self) -> Result<Self> {
        Ok(self.fourier()?.reflect())
    }

    /// Largest coefficient of `self - other` (with no zero-dropping).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.same_space(other);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, b)| (-c, b.clone())));
        canonicalize_terms(self.p, terms, 0.0)
            .iter()
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }

    /// `(v, ∫_{|x| = p^-v} φ dx)` for every sphere meeting the support.
    /// Fails if φ does not vanish near 0.
    pub fn sphere_integrals(&self) -> Result<Vec<(i32, Complex64)>> {
        let mut acc: std::collections::BTreeMap<i32, Complex64> = Default::default();
        for (c, b) in &self.terms {
            match b.center.valuation() {
                Some(v) => *acc.entry(v).or_default() += c * b.volume(self.delta),
                None => return Err(Error::NotCuspidal("does not vanish near 0".into())),
            }
        }
        Ok(acc.into_iter().collect())
    }

    /// Smallest and largest radius exponents present.
    pub fn depth_range(&self) -> Option<(i32, i32)> {
        let it = self.terms.iter().map(|(_, b)| b.radius_exp);
        Some((it.clone().min()?, it.max()?))
    }
}

/// Seeded random function: `n_terms` balls with centre valuation and radius
/// exponent in `[-3, 3]` and coefficients in `{-2, -7/4, ..., 2}` (imaginary
/// parts likewise unless `real`).
pub fn random_bruhat<R: rand::Rng>(rng: &mut R, p: u32, delta: u32, n_terms: usize, real: bool) -> BruhatFunction {
    let mut terms = Vec::with_capacity(n_terms);
    let coef = |rng: &mut R| rng.gen_range(-8i32..=8) as f64 / 4.0;
    for _ in 0..n_terms {
        let n = rng.gen_range(-3i32..=3);
        let v = rng.gen_range(-3i32..=3);
        let mut digits = Vec::new();
        if v < n {
            digits.push(rng.gen_range(1..p));
            for _ in v + 1..n {
                digits.push(rng.gen_range(0..p));
            }
        }
        let c = PadicNumber::from_digits(p, v, &digits).expect("valid digits");
        let re = coef(rng);
        let im = if real { 0.0 } else { coef(rng) };
        terms.push((Complex64::new(re, im), Ball::new(&c, n)));
    }
    BruhatFunction::from_terms(p, delta, terms)
}

fn expansion_size(p: u32, depth: u32) -> Result<u128> {
    (p as u128)
        .checked_pow(depth)
        .filter(|&m| m <= MAX_EXPANSION)
        .ok_or_else(|| Error::InvalidArgument(format!("Fourier expansion needs {p}^{depth} pieces")))
}

fn base_p_digits(mut y: u128, p: u32, len: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(len as usize);
    for _ in 0..len {
        d.push((y % p as u128) as u32);
        y /= p as u128;
    }
    d
}

/// Disjoint-ball canonical form. Coefficients with modulus at most
/// `rel_tol · max|c|` are dropped, and `p` sibling balls with equal
/// coefficients are merged into their parent.
fn canonicalize_terms(p: u32, terms: Vec<(Complex64, Ball)>, rel_tol: f64) -> Vec<(Complex64, Ball)> {
    if terms.is_empty() {
        return terms;
    }
    let scale = terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale;

    // every finite family of balls sits inside one ball around 0
    let root_level = terms
        .iter()
        .map(|(_, b)| match b.center.valuation() {
            Some(v) => v.min(b.radius_exp),
            None => b.radius_exp,
        })
        .min()
        .expect("nonempty");
    let mut out = refine(p, Ball::around_zero(p, root_level), Complex64::new(0.0, 0.0), terms, tol);
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

fn refine(
    p: u32,
    ball: Ball,
    inherited: Complex64,
    members: Vec<(Complex64, Ball)>,
    tol: f64,
) -> Vec<(Complex64, Ball)> {
    let mut c = inherited;
    let mut inner: Vec<Vec<(Complex64, Ball)>> = Vec::new();
    for (a, b) in members {
        if b.radius_exp == ball.radius_exp {
            c += a;
        } else {
            let d = b.center.digit(ball.radius_exp) as usize;
            if inner.is_empty() {
                inner = vec![Vec::new(); p as usize];
            }
            inner[d].push((a, b));
        }
    }
    if inner.is_empty() {
        return if is_negligible(c, tol) {
            Vec::new()
        } else {
            vec![(c, ball)]
        };
    }
    let mut pieces: Vec<Vec<(Complex64, Ball)>> = Vec::with_capacity(p as usize);
    for (d, group) in inner.into_iter().enumerate() {
        let child = ball.child(d as u32);
        if group.is_empty() {
            pieces.push(if is_negligible(c, tol) {
                Vec::new()
            } else {
                vec![(c, child)]
            });
        } else {
            pieces.push(refine(p, child, c, group, tol));
        }
    }
    if pieces.iter().all(|v| v.is_empty()) {
        return Vec::new();
    }
    let first = pieces[0].first().map(|(c, b)| (*c, b.radius_exp));
    if let Some((c0, n0)) = first {
        let uniform = n0 == ball.radius_exp + 1
            && pieces.iter().all(|v| {
                v.len() == 1 && v[0].1.radius_exp == n0 && (v[0].0 - c0).norm() <= tol.max(0.0)
            });
        if uniform {
            return vec![(c0, ball)];
        }
    }
    pieces.into_iter().flatten().collect()
}

/// On-disk representation of a Bruhat function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruhatFile {
    pub p: u32,
    pub delta: u32,
    pub terms: Vec<BruhatFileTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruhatFileTerm {
    pub re: f64,
    pub im: f64,
    pub center_valuation: i32,
    pub center_digits: Vec<u32>,
    pub radius_exp: i32,
}

impl BruhatFile {
    pub fn to_function(&self) -> Result<BruhatFunction> {
        if !crate::padic::number::is_prime(self.p as u64) {
            return Err(Error::InvalidArgument(format!("{} is not prime", self.p)));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = PadicNumber::from_digits(self.p, t.center_valuation, &t.center_digits)?;
            terms.push((Complex64::new(t.re, t.im), Ball::new(&c, t.radius_exp)));
        }
        Ok(BruhatFunction::from_terms(self.p, self.delta, terms))
    }

    pub fn from_function(phi: &BruhatFunction) -> Self {
        Self {
            p: phi.p(),
            delta: phi.delta(),
            terms: phi
                .terms()
                .iter()
                .map(|(c, b)| BruhatFileTerm {
                    re: c.re,
                    im: c.im,
                    center_valuation: b.center().valuation().unwrap_or(0),
                    center_digits: b.center().unit_digits().to_vec(),
                    radius_exp: b.radius_exp(),
                })
                .collect(),
        }
    }
}
