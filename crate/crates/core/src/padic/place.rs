use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::number::is_prime;
use crate::error::{Error, Result};

/// A completion of Q: a prime `p` (with a differential exponent, 0 over Q but
/// adjustable for experiments), the reals, or the complex numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Finite { p: u32, delta: u32 },
    Real,
    Complex,
}

impl Place {
    pub fn finite(p: u32) -> Result<Self> {
        Self::finite_with_delta(p, 0)
    }

    pub fn finite_with_delta(p: u32, delta: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(Place::Finite { p, delta })
    }

    /// Residue field cardinality; `None` at archimedean places.
    pub fn q(&self) -> Option<u32> {
        match self {
            Place::Finite { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn delta(&self) -> u32 {
        match self {
            Place::Finite { delta, .. } => *delta,
            _ => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Place::Finite { .. })
    }

    /// `log |k|_ν` for a nonzero rational `k = num/den`.
    pub fn log_abs_rational(&self, num: i64, den: i64) -> f64 {
        assert!(num != 0 && den != 0, "k must be nonzero");
        match self {
            Place::Finite { p, .. } => {
                let v = valuation_i64(num, *p) - valuation_i64(den, *p);
                -(v as f64) * (*p as f64).ln()
            }
            Place::Real => ((num as f64) / (den as f64)).abs().ln(),
            Place::Complex => 2.0 * ((num as f64) / (den as f64)).abs().ln(),
        }
    }
}

pub(crate) fn valuation_i64(mut n: i64, p: u32) -> i32 {
    let mut v = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    v
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite { p, delta: 0 } => write!(f, "p:{p}"),
            Place::Finite { p, delta } => write!(f, "p:{p}:delta:{delta}"),
            Place::Real => write!(f, "real"),
            Place::Complex => write!(f, "complex"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    /// `p:5`, `p:3:delta:1`, `real` or `complex`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidArgument(format!("unrecognised place '{s}'"));
        match parts.as_slice() {
            ["real"] => Ok(Place::Real),
            ["complex"] => Ok(Place::Complex),
            ["p", p] => Place::finite(p.parse().map_err(|_| bad())?),
            ["p", p, "delta", d] => Place::finite_with_delta(
                p.parse().map_err(|_| bad())?,
                d.parse().map_err(|_| bad())?,
            ),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["p:5", "p:3:delta:2", "real", "complex"] {
            assert_eq!(s.parse::<Place>().unwrap().to_string(), s);
        }
        assert!("p:6".parse::<Place>().is_err());
        assert!("imaginary".parse::<Place>().is_err());
    }

    #[test]
    fn product_formula_for_small_rationals() {
        for (n, d) in [(2, 1), (3, 1), (6, 1), (1, 2), (-12, 35)] {
            let mut total = Place::Real.log_abs_rational(n, d);
            for p in [2, 3, 5, 7] {
                total += Place::finite(p).unwrap().log_abs_rational(n, d);
            }
            assert!(total.abs() < 1e-14, "{n}/{d}: {total}");
        }
    }
}
