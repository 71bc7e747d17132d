//! Dense univariate polynomials over a [`Field`].

use serde::{Deserialize, Serialize};

use super::field::{Field, FieldElem};

/// Coefficients low degree first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::new(vec![c])
    }

    /// x^k.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        Poly { coeffs: c }
    }

    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> FieldElem {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn add(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| f.add(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn sub(&self, f: &Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| f.sub(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, f: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, f: &Field, k: u32) -> Poly {
        (0..k).fold(Poly::constant(1), |acc, _| acc.mul(f, self))
    }

    pub fn derivative(&self, f: &Field) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| f.scale_int(c, k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, f: &Field, x: FieldElem) -> FieldElem {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, f: &Field, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = f.mul(rem[k], lead_inv);
            if c == 0 {
                continue;
            }
            quot[k - dd] = c;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + i] = f.sub(rem[k - dd + i], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Coefficients of f(x + a), i.e. the Taylor expansion at a.
    pub fn shift(&self, f: &Field, a: FieldElem) -> Poly {
        // Horner in the ring F[x] with x -> x + a.
        let lin = Poly::new(vec![a, 1]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(f, &lin).add(f, &Poly::constant(c)))
    }

    /// True when only exponents divisible by `step` carry nonzero coefficients.
    pub fn is_in_powers(&self, step: usize) -> bool {
        self.coeffs.iter().enumerate().all(|(k, &c)| c == 0 || k % step == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_rem_reconstructs() {
        let f = Field::prime(5).unwrap();
        let a = Poly::new(vec![1, 2, 3, 4, 1]);
        let b = Poly::new(vec![2, 0, 1]);
        let (q, r) = a.div_rem(&f, &b);
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn shift_evaluates_consistently() {
        let f = Field::prime(7).unwrap();
        let a = Poly::new(vec![3, 1, 4, 1, 5]);
        let s = a.shift(&f, 1);
        for x in 0..7 {
            assert_eq!(s.eval(&f, x), a.eval(&f, f.add(x, 1)));
        }
    }

    #[test]
    fn derivative_of_pth_power_vanishes() {
        let f = Field::prime(3).unwrap();
        let a = Poly::new(vec![1, 2, 1]).pow(&f, 3);
        assert!(a.derivative(&f).is_zero());
        assert!(a.is_in_powers(3));
    }
}
