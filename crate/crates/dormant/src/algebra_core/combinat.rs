//! Base-p combinatorics: Lucas binomials, divided-power index splitting and
//! p-adic factorials.

use super::field::pow_mod;

/// Base-p digits of `n`, least significant first. Zero has no digits.
pub fn base_digits(mut n: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p);
        n /= p;
    }
    out
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

/// C(l, j) mod p by Lucas' theorem.
pub fn lucas_binom(l: u64, j: u64, p: u64) -> u64 {
    if j > l {
        return 0;
    }
    let (mut l, mut j) = (l, j);
    let mut acc = 1u64;
    while j > 0 || l > 0 {
        let (ld, jd) = (l % p, j % p);
        if jd > ld {
            return 0;
        }
        acc = acc * small_binom_mod(ld, jd, p) % p;
        l /= p;
        j /= p;
    }
    acc
}

/// C(l, j) mod p for a possibly negative `l`.
///
/// For fixed j the map l -> C(l, j) mod p is periodic with period p^K whenever
/// p^K > j, which gives the extension to negative arguments.
pub fn binom_signed(l: i64, j: u64, p: u64) -> u64 {
    if l >= 0 {
        return lucas_binom(l as u64, j, p);
    }
    let mut period = p;
    while period <= j {
        period *= p;
    }
    let shifted = l.rem_euclid(period as i64) as u64;
    lucas_binom(shifted, j, p)
}

/// Splitting of a divided-power index at level m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QDecomp {
    pub quotient: u64,
    pub remainder: u64,
    /// quotient! reduced mod p.
    pub factorial_mod_p: u64,
}

/// j = p^m q + r with 0 <= r < p^m.
pub fn q_decomp(j: u64, m: u32, p: u64) -> QDecomp {
    let pm = p.pow(m);
    let quotient = j / pm;
    let remainder = j % pm;
    let factorial_mod_p = if quotient >= p {
        0
    } else {
        (1..=quotient).fold(1 % p, |acc, k| acc * k % p)
    };
    QDecomp { quotient, remainder, factorial_mod_p }
}

/// n! = p^v * u; returns (v, u mod p).
///
/// Uses u = (-1)^v * prod (n_i!) mod p over the base-p digits n_i of n.
pub fn padic_factorial(n: u64, p: u64) -> (u64, u64) {
    let mut v = 0;
    let mut m = n / p;
    while m > 0 {
        v += m;
        m /= p;
    }
    let mut u = 1u64;
    for d in base_digits(n, p) {
        for k in 2..=d {
            u = u * k % p;
        }
    }
    if v % 2 == 1 {
        u = (p - u) % p;
    }
    (v, u)
}

/// Value mod p of the integer prod(numer!) / prod(denom!).
///
/// Panics if the quotient is not p-integral; callers only pass integer quotients.
pub fn factorial_ratio_mod_p(numer: &[u64], denom: &[u64], p: u64) -> u64 {
    let mut v: i64 = 0;
    let mut u = 1u64;
    for &n in numer {
        let (vn, un) = padic_factorial(n, p);
        v += vn as i64;
        u = u * un % p;
    }
    for &n in denom {
        let (vn, un) = padic_factorial(n, p);
        v -= vn as i64;
        u = u * pow_mod(un, p - 2, p) % p;
    }
    assert!(v >= 0, "factorial ratio is not p-integral");
    if v > 0 {
        0
    } else {
        u
    }
}
