//! p-adic numbers stored as a valuation and a window of base-p digits.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Default number of base-p digits carried after the leading one.
pub const DEFAULT_PRECISION: usize = 64;

/// `x = Σ_k digits[k] · p^(valuation + k)`, known modulo `p^(valuation + precision)`.
///
/// The leading digit is nonzero unless the number is zero (empty digit list),
/// so `|x|_p = p^(-valuation)` exactly.
#[derive(Debug, Clone)]
pub struct PadicNumber {
    p: u32,
    valuation: i32,
    digits: Vec<u32>,
    precision: usize,
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.valuation == other.valuation && self.digits == other.digits
    }
}
impl Eq for PadicNumber {}

impl Hash for PadicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.valuation.hash(state);
        self.digits.hash(state);
    }
}

impl PartialOrd for PadicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PadicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.is_zero()
            .cmp(&other.is_zero())
            .reverse()
            .then(self.valuation.cmp(&other.valuation))
            .then_with(|| self.digits.cmp(&other.digits))
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let shown: Vec<String> = self.digits.iter().take(12).map(|d| d.to_string()).collect();
        write!(
            f,
            "{}^{}·[{}{}]",
            self.p,
            self.valuation,
            shown.join(","),
            if self.digits.len() > 12 { ",…" } else { "" }
        )
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

impl PadicNumber {
    pub fn zero(p: u32) -> Self {
        Self {
            p,
            valuation: 0,
            digits: Vec::new(),
            precision: DEFAULT_PRECISION,
        }
    }

    /// Builds `Σ digits[k] p^(valuation+k)`; digits must be `< p`. Leading zero
    /// digits are absorbed into the valuation.
    pub fn from_digits(p: u32, valuation: i32, digits: &[u32]) -> Result<Self> {
        Self::from_digits_with_precision(p, valuation, digits, DEFAULT_PRECISION)
    }

    pub fn from_digits_with_precision(
        p: u32,
        valuation: i32,
        digits: &[u32],
        precision: usize,
    ) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidArgument(format!("digit {d} out of range for p = {p}")));
        }
        let mut x = Self {
            p,
            valuation,
            digits: digits.to_vec(),
            precision,
        };
        x.normalize();
        Ok(x)
    }

    pub fn from_i64(p: u32, n: i64) -> Result<Self> {
        Self::from_rational(p, n, 1)
    }

    /// `num / den` for any nonzero `den`.
    pub fn from_rational(p: u32, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if !is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if num == 0 {
            return Ok(Self::zero(p));
        }
        let (mut num, mut den) = (num as i128, den as i128);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let pp = p as i128;
        let mut v = 0i32;
        while num % pp == 0 {
            num /= pp;
            v += 1;
        }
        while den % pp == 0 {
            den /= pp;
            v -= 1;
        }
        let negative = num < 0;
        let mut a = Self::from_positive(p, num.unsigned_abs())?;
        let b = Self::from_positive(p, den as u128)?;
        a = a.mul(&b.inv()?);
        if negative {
            a = a.neg();
        }
        a.valuation += v;
        Ok(a)
    }

    fn from_positive(p: u32, mut n: u128) -> Result<Self> {
        let mut digits = Vec::new();
        while n > 0 {
            digits.push((n % p as u128) as u32);
            n /= p as u128;
        }
        Self::from_digits(p, 0, &digits)
    }

    fn normalize(&mut self) {
        let lead = self.digits.iter().position(|&d| d != 0);
        match lead {
            None => {
                self.digits.clear();
                self.valuation = 0;
            }
            Some(k) => {
                self.digits.drain(..k);
                self.valuation += k as i32;
                self.digits.truncate(self.precision);
                while self.digits.last() == Some(&0) {
                    self.digits.pop();
                }
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// `v_p(x)`; `None` for zero.
    pub fn valuation(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.valuation)
    }

    pub fn unit_digits(&self) -> &[u32] {
        &self.digits
    }

    /// `|x|_p = p^(-v)`, 0 for zero.
    pub fn abs(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            (self.p as f64).powi(-self.valuation)
        }
    }

    /// Digit at absolute position `pos` (coefficient of `p^pos`).
    pub fn digit(&self, pos: i32) -> u32 {
        if self.is_zero() || pos < self.valuation {
            return 0;
        }
        let k = (pos - self.valuation) as usize;
        self.digits.get(k).copied().unwrap_or(0)
    }

    /// Keeps only the digits at positions `< n`; the canonical centre of the
    /// ball `x + p^n Z_p`.
    pub fn truncate_below(&self, n: i32) -> Self {
        let mut out = self.clone();
        if out.is_zero() || n <= out.valuation {
            return Self {
                precision: self.precision,
                ..Self::zero(self.p)
            };
        }
        let keep = (n - out.valuation) as usize;
        out.digits.truncate(keep);
        out.normalize();
        out
    }

    /// Whether `x ≡ y (mod p^n)`.
    pub fn agrees_below(&self, other: &Self, n: i32) -> bool {
        let lo = match (self.valuation(), other.valuation()) {
            (None, None) => return true,
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        (lo..n).all(|j| self.digit(j) == other.digit(j))
    }

    /// `Σ_{lo <= j < hi} digit(j) · p^(j - lo)` as an integer.
    pub fn residue(&self, lo: i32, hi: i32) -> u128 {
        let mut acc: u128 = 0;
        let mut j = hi - 1;
        while j >= lo {
            acc = acc
                .checked_mul(self.p as u128)
                .and_then(|a| a.checked_add(self.digit(j) as u128))
                .expect("p-adic residue exceeds 128 bits");
            j -= 1;
        }
        acc
    }

    /// Fractional part `{x}_p ∈ [0, 1)`.
    pub fn fractional_part(&self) -> f64 {
        match self.valuation() {
            Some(v) if v < 0 => {
                let r = self.residue(v, 0);
                r as f64 / (self.p as f64).powi(-v)
            }
            _ => 0.0,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let precision = self.precision.min(other.precision);
        let lo = self.valuation.min(other.valuation);
        // digits beyond the shorter relative window are unknown; keep the window
        // anchored at the smaller valuation
        let mut digits = Vec::with_capacity(precision);
        let mut carry = 0u32;
        for k in 0..precision as i32 {
            let s = self.digit(lo + k) + other.digit(lo + k) + carry;
            digits.push(s % self.p);
            carry = s / self.p;
        }
        let mut out = Self {
            p: self.p,
            valuation: lo,
            digits,
            precision,
        };
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.p;
        let mut digits = Vec::with_capacity(self.precision);
        digits.push(p - self.digits[0]);
        for k in 1..self.precision {
            digits.push(p - 1 - self.digits.get(k).copied().unwrap_or(0));
        }
        let mut out = Self {
            p,
            valuation: self.valuation,
            digits,
            precision: self.precision,
        };
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let precision = self.precision.min(other.precision);
        let p = self.p as u64;
        let mut acc = vec![0u64; precision];
        for (i, &a) in self.digits.iter().enumerate().take(precision) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits.iter().enumerate().take(precision - i) {
                acc[i + j] += a as u64 * b as u64;
            }
            // keep the accumulator bounded
            let mut carry = 0u64;
            for slot in acc.iter_mut() {
                let s = *slot + carry;
                *slot = s % p;
                carry = s / p;
            }
        }
        let mut out = Self {
            p: self.p,
            valuation: self.valuation + other.valuation,
            digits: acc.into_iter().map(|d| d as u32).collect(),
            precision,
        };
        out.normalize();
        out
    }

    /// Multiplicative inverse, digit by digit modulo `p^precision`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("inverse of zero".into()));
        }
        let p = self.p;
        let d0_inv = mod_inverse(self.digits[0] as u64, p as u64).expect("leading digit is a unit") as u32;
        let unit = Self {
            p,
            valuation: 0,
            digits: self.digits.clone(),
            precision: self.precision,
        };
        // solve unit * y ≡ 1, one digit at a time
        let mut y = vec![0u32; self.precision];
        let mut residual = Self::from_digits_with_precision(p, 0, &[1], self.precision)?;
        for (k, yk_slot) in y.iter_mut().enumerate() {
            let r = residual.digit(k as i32);
            if r == 0 {
                continue;
            }
            let yk = (r as u64 * d0_inv as u64 % p as u64) as u32;
            *yk_slot = yk;
            let term = Self::from_digits_with_precision(p, k as i32, &[yk], self.precision)?;
            residual = residual.sub(&unit.mul(&term));
        }
        let mut out = Self {
            p,
            valuation: -self.valuation,
            digits: y,
            precision: self.precision,
        };
        out.normalize();
        Ok(out)
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i32) -> Self {
        let mut out = self.clone();
        if !out.is_zero() {
            out.valuation += k;
        }
        out
    }

    /// Unit part `x / p^v(x)` reduced modulo `p^f`.
    pub fn unit_residue(&self, f: u32) -> Option<u64> {
        let v = self.valuation()?;
        Some(self.residue(v, v + f as i32) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_round_trip() {
        let x = PadicNumber::from_i64(5, 2 * 125 + 3 * 25).unwrap();
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit_digits(), &[3, 2]);
        assert!((x.abs() - 1.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn minus_one_is_all_top_digits() {
        let m = PadicNumber::from_i64(3, -1).unwrap();
        assert_eq!(m.unit_digits().len(), DEFAULT_PRECISION);
        assert!(m.unit_digits().iter().all(|&d| d == 2));
        let one = PadicNumber::from_i64(3, 1).unwrap();
        assert!(m.add(&one).is_zero());
    }

    #[test]
    fn inverse_of_two_in_q5() {
        let two = PadicNumber::from_i64(5, 2).unwrap();
        let half = two.inv().unwrap();
        let one = PadicNumber::from_i64(5, 1).unwrap();
        assert_eq!(two.mul(&half), one);
        // 1/2 = 3 + 2*5 + 2*25 + ...
        assert_eq!(&half.unit_digits()[..4], &[3, 2, 2, 2]);
    }

    #[test]
    fn rationals_with_p_in_denominator() {
        let x = PadicNumber::from_rational(2, 3, 4).unwrap();
        assert_eq!(x.valuation(), Some(-2));
        assert!((x.fractional_part() - 0.75).abs() < 1e-15);
        let y = PadicNumber::from_rational(3, -1, 3).unwrap();
        assert!((y.fractional_part() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_and_agreement() {
        let x = PadicNumber::from_i64(2, 0b1011).unwrap();
        let t = x.truncate_below(2);
        assert_eq!(t, PadicNumber::from_i64(2, 3).unwrap());
        assert!(x.agrees_below(&t, 2));
        assert!(!x.agrees_below(&t, 4));
        assert!(PadicNumber::from_i64(2, 8).unwrap().truncate_below(3).is_zero());
    }

    #[test]
    fn rejects_composite_base() {
        assert!(PadicNumber::from_i64(4, 1).is_err());
    }

    fn small_rational() -> impl proptest::strategy::Strategy<Value = (i64, i64)> {
        use proptest::prelude::*;
        (-500i64..500, 1i64..60).prop_filter("nonzero", |(n, _)| *n != 0)
    }

    proptest::proptest! {
        #[test]
        fn field_axioms_mod_precision(
            (a, b) in small_rational(),
            (c, d) in small_rational(),
            p in proptest::sample::select(vec![2u32, 3, 5, 7]),
        ) {
            let x = PadicNumber::from_rational(p, a, b).unwrap();
            let y = PadicNumber::from_rational(p, c, d).unwrap();
            let sum = PadicNumber::from_rational(p, a * d + c * b, b * d).unwrap();
            let prod = PadicNumber::from_rational(p, a * c, b * d).unwrap();
            let lo = -20;
            let hi = 30;
            proptest::prop_assert!(x.add(&y).agrees_below(&sum, hi) || sum.valuation().is_some_and(|v| v < lo));
            proptest::prop_assert!(x.mul(&y).agrees_below(&prod, hi));
            let one = PadicNumber::from_i64(p, 1).unwrap();
            proptest::prop_assert!(x.mul(&x.inv().unwrap()).agrees_below(&one, 40));
        }
    }
}
