//! Dirichlet characters: construction from generator images, conductors,
//! enumeration, and localisation to the places of Q.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::character::{character_table, LocalCharacter, PlaceCharacter, RootOfUnity};
use crate::padic::Place;

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Prime factorisation as `(p, k)` pairs in increasing order.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        let mut k = 0;
        while m.is_multiple_of(d) {
            m /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn mul_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * a % m;
        k += 1;
    }
    k
}

/// Solves `x ≡ a (mod q)`, `x ≡ 1 (mod m/q)` for coprime `q | m`.
fn crt_lift(a: u64, q: u64, m: u64) -> u64 {
    let r = m / q;
    (0..m / r.max(1))
        .map(|t| 1 + t * r)
        .find(|x| x % q == a % q)
        .map(|x| x % m)
        .unwrap_or(a % m)
}

/// Standard generators of `(Z/m)^×` with their orders: the least primitive
/// root of each odd prime-power factor, `-1` and `5` for `2^k` (k >= 3),
/// `-1` for 4, each lifted by CRT to be 1 at the other factors.
pub fn standard_generators(m: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for (p, k) in factorize(m) {
        let q = p.pow(k);
        let local: Vec<(u64, u64)> = if p == 2 {
            match k {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(q - 1, 2), (5, q / 4)],
            }
        } else {
            let order = q / p * (p - 1);
            let g = (2..q)
                .find(|&g| gcd(g, p) == 1 && mul_order(g, q) == order)
                .expect("odd prime powers are cyclic");
            vec![(g, order)]
        };
        for (g, ord) in local {
            out.push((crt_lift(g, q, m), ord));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorImage {
    pub g: u64,
    pub num: i64,
    pub den: u64,
}

/// JSON form `{"modulus": m, "generators": [{"g", "num", "den"}]}`: the
/// character sends `g` to `exp(2πi num/den)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub generators: Vec<GeneratorImage>,
}

impl CharacterSpec {
    pub fn trivial() -> Self {
        Self {
            modulus: 1,
            generators: Vec::new(),
        }
    }

    /// Parses `trivial` or `mod:M:gen:G:exp:E[:gen:G:exp:E...]`, where `E`
    /// is `num/den` or an integer numerator over the order of `G`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "trivial" {
            return Ok(Self::trivial());
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("cannot parse character `{s}`"));
        if parts.len() < 2 || parts[0] != "mod" || !(parts.len() - 2).is_multiple_of(4) {
            return Err(bad());
        }
        let modulus: u64 = parts[1].parse().map_err(|_| bad())?;
        if modulus == 0 {
            return Err(bad());
        }
        let mut generators = Vec::new();
        for chunk in parts[2..].chunks(4) {
            if chunk[0] != "gen" || chunk[2] != "exp" {
                return Err(bad());
            }
            let g: u64 = chunk[1].parse().map_err(|_| bad())?;
            let (num, den) = match chunk[3].split_once('/') {
                Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
                None => {
                    if gcd(g % modulus, modulus) != 1 {
                        return Err(bad());
                    }
                    (chunk[3].parse().map_err(|_| bad())?, mul_order(g, modulus))
                }
            };
            generators.push(GeneratorImage { g, num, den });
        }
        Ok(Self { modulus, generators })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    modulus: u64,
    table: Vec<Option<RootOfUnity>>,
    conductor: u64,
    odd: bool,
}

pub fn build_character(spec: &CharacterSpec) -> Result<DirichletCharacter> {
    let m = spec.modulus;
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let mut gens = Vec::with_capacity(spec.generators.len());
    for g in &spec.generators {
        gens.push((g.g % m, RootOfUnity::new(g.num, g.den)?));
    }
    let table = character_table(m, &gens)?;
    let odd = m > 2 && !table[(m - 1) as usize].expect("-1 is a unit").is_one();
    let mut chi = DirichletCharacter {
        modulus: m,
        table,
        conductor: m,
        odd,
    };
    chi.conductor = compute_conductor(&chi);
    Ok(chi)
}

fn compute_conductor(chi: &DirichletCharacter) -> u64 {
    let m = chi.modulus;
    (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .find(|&d| {
            (0..m)
                .filter(|&a| a % d == 1 % d)
                .all(|a| chi.table[a as usize].is_none_or(|v| v.is_one()))
        })
        .unwrap_or(m)
}

/// All characters mod `m`, in lexicographic order of their exponent vectors
/// on the standard generators.
pub fn enumerate_characters(m: u64) -> Vec<DirichletCharacter> {
    let gens = standard_generators(m);
    let mut out = Vec::new();
    let mut exps = vec![0u64; gens.len()];
    loop {
        let spec = CharacterSpec {
            modulus: m,
            generators: gens
                .iter()
                .zip(&exps)
                .map(|(&(g, ord), &e)| GeneratorImage { g, num: e as i64, den: ord })
                .collect(),
        };
        out.push(build_character(&spec).expect("standard generators are independent"));
        let mut i = 0;
        loop {
            if i == gens.len() {
                return out;
            }
            exps[i] += 1;
            if exps[i] < gens[i].1 {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        build_character(&CharacterSpec::trivial()).expect("trivial character")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    /// Exact value, `None` when `gcd(n, m) > 1`.
    pub fn value_exact(&self, n: i64) -> Option<RootOfUnity> {
        self.table[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, n: i64) -> Complex64 {
        self.value_exact(n).map_or(Complex64::new(0.0, 0.0), |r| r.to_complex())
    }

    pub fn table(&self) -> &[Option<RootOfUnity>] {
        &self.table
    }

    /// Conductor exponents `f_p` of the primes dividing the conductor.
    pub fn local_conductor_exponents(&self) -> BTreeMap<u64, u32> {
        factorize(self.conductor).into_iter().collect()
    }
}

pub fn conductor_of(chi: &DirichletCharacter) -> u64 {
    chi.conductor
}

/// The local component at `place` of the idele class character attached to
/// a primitive `χ` mod `m`.
///
/// Away from `m` it is unramified with `χ_p(p) = χ(p)`. At `p^k ∥ m` the unit
/// part is the inverse of the CRT factor of `χ` on `(Z/p^k)^×`, and the value at
/// `p` is `χ(p')` with `p' ≡ p mod m/p^k`, `p' ≡ 1 mod p^k`; these choices make the
/// product over all places trivial on Q^×. At the real place it is `sign^parity`.
pub fn localize_dirichlet(chi: &DirichletCharacter, place: Place) -> Result<PlaceCharacter> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            modulus: chi.modulus,
            conductor: chi.conductor,
        });
    }
    let m = chi.modulus;
    match place {
        Place::Real => Ok(PlaceCharacter::Real { odd: chi.odd }),
        Place::Complex => Err(Error::InvalidArgument(
            "Q has no complex place".into(),
        )),
        Place::Finite { p, .. } => {
            let p64 = p as u64;
            if !m.is_multiple_of(p64) {
                let theta = chi.value_exact(p as i64).expect("p is prime to m").angle();
                return Ok(PlaceCharacter::Finite(LocalCharacter::unramified(place, theta)?));
            }
            let mut k = 0;
            let mut q = 1u64;
            while m.is_multiple_of(q * p64) {
                q *= p64;
                k += 1;
            }
            let theta = chi.value_exact(crt_lift(p64, m / q, m) as i64).map_or(0.0, |r| r.angle());
            let table = (0..q)
                .map(|u| {
                    if u % p64 == 0 {
                        None
                    } else {
                        chi.value_exact(crt_lift(u, q, m) as i64).map(|r| r.inv())
                    }
                })
                .collect();
            Ok(PlaceCharacter::Finite(LocalCharacter::new(place, theta, k, table)?))
        }
    }
}

/// Primes at which the localisation is ramified.
pub fn ramified_primes(chi: &DirichletCharacter) -> Vec<u64> {
    factorize(chi.conductor).into_iter().map(|(p, _)| p).collect()
}
