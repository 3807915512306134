//! Unitary characters of Q_p^× and exact roots of unity.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::number::PadicNumber;
use super::place::Place;
use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `exp(2πi num/den)`, stored reduced with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("root of unity with zero order".into()));
        }
        let n = num.rem_euclid(den as i64) as u64;
        let g = gcd(n, den);
        Ok(Self {
            num: n / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// Order of the root.
    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let den = self.den / gcd(self.den, other.den) * other.den;
        let num = (self.num as u128 * (den / self.den) as u128 + other.num as u128 * (den / other.den) as u128)
            % den as u128;
        Self::new(num as i64, den).expect("nonzero order")
    }

    pub fn pow(&self, k: i64) -> Self {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Self::new(n as i64, self.den).expect("nonzero order")
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.num == 0 {
            return Complex64::new(1.0, 0.0);
        }
        // exact values at the quarter turns
        if (self.num * 4).is_multiple_of(self.den) { match self.num * 4 / self.den {
            1 => return Complex64::new(0.0, 1.0),
            2 => return Complex64::new(-1.0, 0.0),
            3 => return Complex64::new(0.0, -1.0),
            _ => {}
        } }
        Complex64::from_polar(1.0, 2.0 * PI * self.num as f64 / self.den as f64)
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.num as f64 / self.den as f64
    }
}

/// Character table of `(Z/m)^×` induced by generator images, built by
/// breadth-first search from 1. Entries for residues not coprime to `m` are
/// `None`. Fails if the images are inconsistent or the generators do not span.
pub fn character_table(m: u64, gens: &[(u64, RootOfUnity)]) -> Result<Vec<Option<RootOfUnity>>> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let mut table: Vec<Option<RootOfUnity>> = vec![None; m as usize];
    table[(1 % m) as usize] = Some(RootOfUnity::ONE);
    let mut queue = VecDeque::from([1 % m]);
    while let Some(a) = queue.pop_front() {
        let va = table[a as usize].expect("visited");
        for &(g, img) in gens {
            if gcd(g % m, m) != 1 {
                return Err(Error::InconsistentCharacter(format!("generator {g} is not a unit mod {m}")));
            }
            let b = (a as u128 * g as u128 % m as u128) as u64;
            let vb = va.mul(&img);
            match table[b as usize] {
                None => {
                    table[b as usize] = Some(vb);
                    queue.push_back(b);
                }
                Some(existing) if existing != vb => {
                    return Err(Error::InconsistentCharacter(format!(
                        "residue {b} mod {m} receives both {}/{} and {}/{}",
                        existing.num, existing.den, vb.num, vb.den
                    )));
                }
                Some(_) => {}
            }
        }
    }
    for a in 0..m {
        if gcd(a, m) == 1 && table[a as usize].is_none() {
            return Err(Error::InconsistentCharacter(format!(
                "generators do not reach residue {a} mod {m}"
            )));
        }
    }
    Ok(table)
}

/// A unitary character of Q_p^×: `χ(p^k u) = e^{ikθ} ψ(u mod p^f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalCharacter {
    place: Place,
    theta: f64,
    conductor_exponent: u32,
    /// Indexed by residues mod `p^f`; `None` off the units.
    unit_table: Vec<Option<RootOfUnity>>,
}

impl LocalCharacter {
    pub fn trivial(place: Place) -> Result<Self> {
        Self::unramified(place, 0.0)
    }

    pub fn unramified(place: Place, theta: f64) -> Result<Self> {
        Self::new(place, theta, 0, vec![Some(RootOfUnity::ONE)])
    }

    /// Validates unitarity (exact), multiplicativity on the units and
    /// minimality of the conductor exponent.
    pub fn new(
        place: Place,
        theta: f64,
        conductor_exponent: u32,
        unit_table: Vec<Option<RootOfUnity>>,
    ) -> Result<Self> {
        let p = match place {
            Place::Finite { p, .. } => p as u64,
            _ => {
                return Err(Error::InvalidArgument(
                    "local characters of this type live at finite places".into(),
                ))
            }
        };
        if !theta.is_finite() {
            return Err(Error::NonFinite("unramified angle".into()));
        }
        let theta = theta.rem_euclid(2.0 * PI);
        let m = p.checked_pow(conductor_exponent).ok_or_else(|| {
            Error::InvalidArgument(format!("p^f overflows for f = {conductor_exponent}"))
        })?;
        if unit_table.len() as u64 != m {
            return Err(Error::InconsistentCharacter(format!(
                "unit table has {} entries, expected {m}",
                unit_table.len()
            )));
        }
        for a in 0..m {
            let unit = a % p != 0 || m == 1;
            if unit != unit_table[a as usize].is_some() {
                return Err(Error::InconsistentCharacter(format!(
                    "table entry {a} mod {m} is misplaced"
                )));
            }
        }
        let units: Vec<u64> = (0..m).filter(|a| unit_table[*a as usize].is_some()).collect();
        if units.len() <= 4096 {
            for &a in &units {
                for &b in &units {
                    let ab = (a * b % m) as usize;
                    let lhs = unit_table[ab].unwrap();
                    let rhs = unit_table[a as usize].unwrap().mul(&unit_table[b as usize].unwrap());
                    if lhs != rhs {
                        return Err(Error::InconsistentCharacter(format!(
                            "not multiplicative at {a}·{b} mod {m}"
                        )));
                    }
                }
            }
        }
        if conductor_exponent >= 1 {
            // must be nontrivial on 1 + p^(f-1) Z_p (on all units when f = 1)
            let step = m / p;
            let nontrivial = if conductor_exponent == 1 {
                units.iter().any(|&a| !unit_table[a as usize].unwrap().is_one())
            } else {
                (0..p).any(|k| !unit_table[(1 + k * step) as usize].unwrap().is_one())
            };
            if !nontrivial {
                return Err(Error::InconsistentCharacter(format!(
                    "conductor exponent {conductor_exponent} is not minimal"
                )));
            }
        }
        Ok(Self {
            place,
            theta,
            conductor_exponent,
            unit_table,
        })
    }

    /// Character of conductor exponent `f` from images of generators of
    /// `(Z/p^f)^×`.
    pub fn from_generators(
        place: Place,
        theta: f64,
        conductor_exponent: u32,
        gens: &[(u64, RootOfUnity)],
    ) -> Result<Self> {
        let p = place
            .q()
            .ok_or_else(|| Error::InvalidArgument("finite place required".into()))? as u64;
        let m = p.pow(conductor_exponent);
        let table = character_table(m, gens)?;
        Self::new(place, theta, conductor_exponent, table)
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn p(&self) -> u32 {
        self.place.q().expect("finite place")
    }

    pub fn delta(&self) -> u32 {
        self.place.delta()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn conductor_exponent(&self) -> u32 {
        self.conductor_exponent
    }

    pub fn is_ramified(&self) -> bool {
        self.conductor_exponent > 0
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor_exponent == 0 && self.theta == 0.0
    }

    /// `p^f`.
    pub fn modulus(&self) -> u64 {
        self.unit_table.len() as u64
    }

    pub fn unit_table(&self) -> &[Option<RootOfUnity>] {
        &self.unit_table
    }

    /// Exact value on a unit residue mod `p^f`.
    pub fn unit_value(&self, residue: u64) -> Option<RootOfUnity> {
        self.unit_table[(residue % self.modulus()) as usize]
    }

    /// `χ(p)`.
    pub fn value_at_uniformizer(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn inverse(&self) -> Self {
        Self {
            place: self.place,
            theta: (2.0 * PI - self.theta).rem_euclid(2.0 * PI),
            conductor_exponent: self.conductor_exponent,
            unit_table: self.unit_table.iter().map(|v| v.map(|r| r.inv())).collect(),
        }
    }

    pub fn eval(&self, x: &PadicNumber) -> Result<Complex64> {
        eval_local_character(self, x)
    }

    /// `χ(p^v u)` for an integer residue `u` of the unit part.
    pub fn eval_parts(&self, v: i32, unit_residue: u64) -> Complex64 {
        let u = self.unit_value(unit_residue).expect("unit residue");
        Complex64::from_polar(1.0, self.theta * v as f64) * u.to_complex()
    }
}

/// `e^{iθ v(x)} · ψ(unit part of x mod p^f)`.
pub fn eval_local_character(chi: &LocalCharacter, x: &PadicNumber) -> Result<Complex64> {
    if x.p() != chi.p() {
        return Err(Error::InvalidArgument("character and argument at different primes".into()));
    }
    let v = x
        .valuation()
        .ok_or_else(|| Error::InvalidArgument("character evaluated at 0".into()))?;
    let u = x.unit_residue(chi.conductor_exponent).expect("nonzero");
    Ok(chi.eval_parts(v, u))
}

/// A character of the multiplicative group at any place of Q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlaceCharacter {
    Finite(LocalCharacter),
    /// `x ↦ sign(x)` when odd, trivial otherwise.
    Real { odd: bool },
    /// `z ↦ (z/|z|_R)^n`.
    Complex { twist: i32 },
}

impl PlaceCharacter {
    pub fn place(&self) -> Place {
        match self {
            PlaceCharacter::Finite(c) => c.place(),
            PlaceCharacter::Real { .. } => Place::Real,
            PlaceCharacter::Complex { .. } => Place::Complex,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            PlaceCharacter::Finite(c) => PlaceCharacter::Finite(c.inverse()),
            PlaceCharacter::Real { odd } => PlaceCharacter::Real { odd: *odd },
            PlaceCharacter::Complex { twist } => PlaceCharacter::Complex { twist: -twist },
        }
    }

    pub fn trivial(place: Place) -> Result<Self> {
        Ok(match place {
            Place::Finite { .. } => PlaceCharacter::Finite(LocalCharacter::trivial(place)?),
            Place::Real => PlaceCharacter::Real { odd: false },
            Place::Complex => PlaceCharacter::Complex { twist: 0 },
        })
    }
}
