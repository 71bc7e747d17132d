//! Finite fields F_{p^e} for odd primes p.
//!
//! Elements are stored as `u32` codes: the coefficient vector of the element in the
//! power basis of the defining polynomial, read as a base-p number. With this encoding
//! the prime subfield F_p is exactly the codes `0..p`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Element code of a [`Field`]. Only meaningful together with its field.
pub type FieldElem = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("field of size {p}^{e} is too large for table arithmetic")]
    TooLarge { p: u32, e: u32 },
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    /// Monic defining polynomial, low degree first, length e+1.
    modulus: Vec<u32>,
    /// exp[i] = g^i for a fixed primitive element g, i in 0..q-1.
    exp: Vec<u32>,
    /// log[x] for x != 0.
    log: Vec<u32>,
}

/// The finite field F_{p^e}. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.t.p, self.t.e)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.e == other.t.e && self.t.modulus == other.t.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
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

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..e].iter().enumerate() {
            let sub = c * m as u64 % p as u64;
            prod[k - e + i] = (prod[k - e + i] + p as u64 - sub) % p as u64;
        }
    }
    prod.truncate(e);
    prod.into_iter().map(|x| x as u32).collect()
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut code: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let c = code % p;
            code /= p;
            c
        })
        .collect()
}

/// Polynomial remainder over F_p, returns true when `divisor` divides `a`.
fn divides(divisor: &[u32], a: &[u32], p: u32) -> bool {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dd = divisor.len() - 1;
    let lead_inv = pow_mod(divisor[dd] as u64, p as u64 - 2, p as u64);
    while r.len() > dd {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if top != 0 {
            let c = top * lead_inv % p as u64;
            for (i, &d) in divisor.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p as u64 * p as u64 - c * d as u64) % p as u64;
            }
        }
        r.pop();
    }
    r.iter().all(|&x| x == 0)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    for deg in 1..=e / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut g = decode(code as u32, p, deg as u32);
            g.push(1);
            if divides(&g, f, p) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    /// F_{p^e} with the lexicographically first irreducible defining polynomial.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if p == 2 || !is_prime(p as u64) {
            return Err(FieldError::NotOddPrime(p as u64));
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if e == 0 || q64 > 1 << 20 {
            return Err(FieldError::TooLarge { p, e });
        }
        let q = q64 as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..(p as u64).pow(e))
                .map(|code| {
                    let mut f = decode(code as u32, p, e);
                    f.push(1);
                    f
                })
                .find(|f| f[0] != 0 && is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        'search: for g in 1..q {
            let gv = decode(g, p, e);
            let mut cur = decode(1, p, e);
            for i in 0..(q - 1) {
                let code = encode(&cur, p);
                if i > 0 && code == 1 {
                    continue 'search;
                }
                exp[i as usize] = code;
                log[code as usize] = i;
                cur = if e == 1 {
                    vec![(cur[0] as u64 * gv[0] as u64 % p as u64) as u32]
                } else {
                    poly_mulmod(&cur, &gv, &modulus, p)
                };
            }
            break;
        }
        Ok(Field { t: Arc::new(Tables { p, e, q, modulus, exp, log }) })
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.e
    }

    pub fn size(&self) -> u32 {
        self.t.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn zero(&self) -> FieldElem {
        0
    }

    pub fn one(&self) -> FieldElem {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        n.rem_euclid(self.t.p as i64) as u32
    }

    /// Element with the given power-basis coefficients (low degree first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElem {
        let mut c: Vec<u32> = coeffs.iter().map(|&x| x % self.t.p).collect();
        c.resize(self.t.e as usize, 0);
        encode(&c, self.t.p)
    }

    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        decode(a, self.t.p, self.t.e)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        0..self.t.q
    }

    pub fn is_in_prime_field(&self, a: FieldElem) -> bool {
        a < self.t.p
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.t.p;
        if self.t.e == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.t.e {
            let s = (a % p + b % p) % p;
            out += s * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.t.p;
        if self.t.e == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.t.e {
            out += ((p - a % p) % p) * place;
            place *= p;
            a /= p;
        }
        out
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.t.e == 1 {
            return (a as u64 * b as u64 % self.t.p as u64) as u32;
        }
        let n = self.t.q - 1;
        let s = self.t.log[a as usize] + self.t.log[b as usize];
        self.t.exp[(if s >= n { s - n } else { s }) as usize]
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a != 0, "inverse of zero");
        if self.t.e == 1 {
            return pow_mod(a as u64, self.t.p as u64 - 2, self.t.p as u64) as u32;
        }
        let n = self.t.q - 1;
        let l = self.t.log[a as usize];
        self.t.exp[((n - l) % n) as usize]
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElem, k: u64) -> FieldElem {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.t.q - 1) as u64;
        if self.t.e == 1 {
            return pow_mod(a as u64, k, self.t.p as u64) as u32;
        }
        let l = self.t.log[a as usize] as u64;
        self.t.exp[((l * (k % n)) % n) as usize]
    }

    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.t.p as u64)
    }

    /// Scalar multiple by an integer.
    pub fn scale_int(&self, a: FieldElem, n: i64) -> FieldElem {
        self.mul(a, self.from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.pow(3, 6), 1);
    }

    #[test]
    fn rejects_even_and_composite() {
        assert!(Field::prime(2).is_err());
        assert!(Field::prime(9).is_err());
    }

    #[test]
    fn extension_field_axioms() {
        for (p, e) in [(3, 2), (5, 2), (3, 3)] {
            let f = Field::new(p, e).unwrap();
            let q = f.size();
            for a in 0..q {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.pow(a, q as u64), a);
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let c = (a * 7 + b) % q;
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_prime_field() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.frobenius(a) == a, f.is_in_prime_field(a));
        }
    }
}
