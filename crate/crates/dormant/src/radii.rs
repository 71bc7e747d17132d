//! Residues mod p^N, the radii sets (Z/p^N)^x / {±1}, exponent multisets and
//! level reduction and lifting of radii.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra_core::field::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RadiiError {
    #[error("exponent entries coincide mod p, so the pair does not define a radius")]
    NotInXi,
    #[error("{value} is not a unit mod {p}")]
    NotUnit { value: i64, p: u32 },
    #[error("p = {0} must be an odd prime")]
    BadPrime(u32),
    #[error("level {0} must be at least 1")]
    BadLevel(u32),
    #[error("radius operations need n = 2 exponents, got {0}")]
    WrongRank(usize),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
}

pub fn check_prime_level(p: u32, level: u32) -> Result<(), RadiiError> {
    if p == 2 || !is_prime(p as u64) {
        return Err(RadiiError::BadPrime(p));
    }
    if level == 0 {
        return Err(RadiiError::BadLevel(level));
    }
    Ok(())
}

pub fn modulus(p: u32, level: u32) -> u64 {
    (p as u64).pow(level)
}

/// Modular inverse of 2 mod an odd modulus.
fn half(m: u64) -> u64 {
    m.div_ceil(2)
}

/// An element of Z/p^N Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    pub value: u64,
}

impl ResidueClass {
    pub fn new(p: u32, level: u32, value: i64) -> Self {
        let m = modulus(p, level) as i64;
        ResidueClass { p, level, value: value.rem_euclid(m) as u64 }
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.level)
    }

    /// Base-p digits d_[0], ..., d_[N-1].
    pub fn digits(&self) -> Vec<u64> {
        let p = self.p as u64;
        let mut v = self.value;
        (0..self.level)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn digit(&self, a: u32) -> u64 {
        self.value / (self.p as u64).pow(a) % self.p as u64
    }

    /// d_[0,a] = sum_{b <= a} p^b d_[b], the remainder mod p^{a+1}.
    pub fn prefix(&self, a: u32) -> u64 {
        self.value % (self.p as u64).pow(a + 1)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, self.level, -(self.value as i64))
    }

    pub fn reduce(&self, level: u32) -> Self {
        assert!(level >= 1 && level <= self.level);
        Self::new(self.p, level, self.value as i64)
    }
}

/// An element of (Z/p^N)^x / {±1}, stored by its smaller lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Radius {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    pub rep: u64,
}

impl Radius {
    /// The class of `value` (any integer); errors if it is not a unit.
    pub fn from_value(p: u32, level: u32, value: i64) -> Result<Self, RadiiError> {
        if value.rem_euclid(p as i64) == 0 {
            return Err(RadiiError::NotUnit { value, p });
        }
        let m = modulus(p, level);
        let r = value.rem_euclid(m as i64) as u64;
        Ok(Radius { p, level, rep: r.min(m - r) })
    }

    /// Validate a user-supplied canonical representative.
    pub fn from_rep(p: u32, level: u32, rep: u64) -> Result<Self, RadiiError> {
        check_prime_level(p, level)?;
        let r = Self::from_value(p, level, rep as i64)?;
        if r.rep != rep {
            return Err(RadiiError::NotUnit { value: rep as i64, p });
        }
        Ok(r)
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.level)
    }

    /// The two lifts {rep, p^N - rep}.
    pub fn lifts(&self) -> [u64; 2] {
        [self.rep, self.modulus() - self.rep]
    }
}

/// All of (Z/p^N)^x / {±1}, ascending by representative.
pub fn enum_xi2(p: u32, level: u32) -> Vec<Radius> {
    let m = modulus(p, level);
    (1..=(m - 1) / 2).filter(|r| r % p as u64 != 0).map(|rep| Radius { p, level, rep }).collect()
}

/// Class of rep mod p^{N'}.
pub fn reduce_level(rho: &Radius, level: u32) -> Radius {
    assert!(level >= 1 && level <= rho.level, "target level out of range");
    Radius::from_value(rho.p, level, rho.rep as i64).expect("units stay units")
}

/// All level-(N+1) radii reducing to `rho`.
pub fn lift_fiber(rho: &Radius) -> Vec<Radius> {
    let m = rho.modulus() as i64;
    let mut out: Vec<Radius> = (0..rho.p as i64)
        .map(|k| Radius::from_value(rho.p, rho.level + 1, rho.rep as i64 + k * m).expect("unit"))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The class of (2a + 1) / 2.
pub fn radius_from_edge_number(a: u64, p: u32, level: u32) -> Result<Radius, RadiiError> {
    let m = modulus(p, level);
    let v = (2 * a + 1) % m * half(m) % m;
    Radius::from_value(p, level, v as i64).map_err(|_| RadiiError::NotUnit { value: 2 * a as i64 + 1, p })
}

/// A multiset of n exponents in Z/p^N, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentMultiset {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    pub entries: Vec<u64>,
}

impl ExponentMultiset {
    pub fn new(p: u32, level: u32, entries: &[i64]) -> Self {
        let m = modulus(p, level) as i64;
        let mut e: Vec<u64> = entries.iter().map(|&x| x.rem_euclid(m) as u64).collect();
        e.sort();
        ExponentMultiset { p, level, entries: e }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Membership in the subset with pairwise distinct mod-p images.
    pub fn is_in_xi(&self) -> bool {
        distinct_mod_p(&self.entries, self.p)
    }

    pub fn residues(&self) -> Vec<ResidueClass> {
        self.entries.iter().map(|&v| ResidueClass::new(self.p, self.level, v as i64)).collect()
    }
}

fn distinct_mod_p(entries: &[u64], p: u32) -> bool {
    let mut seen: Vec<u64> = entries.iter().map(|x| x % p as u64).collect();
    seen.sort();
    seen.windows(2).all(|w| w[0] != w[1])
}

/// Radius of an exponent pair: the class of (d_1 - d_2) / 2.
pub fn radius_from_exponent(e: &ExponentMultiset) -> Result<Radius, RadiiError> {
    if e.rank() != 2 {
        return Err(RadiiError::WrongRank(e.rank()));
    }
    if !e.is_in_xi() {
        return Err(RadiiError::NotInXi);
    }
    let m = modulus(e.p, e.level);
    let diff = (e.entries[0] + m - e.entries[1]) % m;
    let v = diff * half(m) % m;
    Radius::from_value(e.p, e.level, v as i64)
}

/// An element of S_n \ (Z/p^N)^n / diagonal, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneralRadius {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    pub entries: Vec<u64>,
}

impl GeneralRadius {
    /// Canonical form: among all shifts that move some entry to 0, the
    /// lexicographically smallest sorted tuple.
    pub fn new(p: u32, level: u32, entries: &[i64]) -> Self {
        let m = modulus(p, level) as i64;
        let best = entries
            .iter()
            .map(|&base| {
                let mut v: Vec<u64> = entries.iter().map(|&x| (x - base).rem_euclid(m) as u64).collect();
                v.sort();
                v
            })
            .min()
            .unwrap_or_default();
        GeneralRadius { p, level, entries: best }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }
}

/// True when the class has representatives with pairwise distinct mod-p entries.
pub fn is_in_xi(g: &GeneralRadius) -> bool {
    distinct_mod_p(&g.entries, g.p)
}
