//! Rational functions whose denominators are supported at x = 0 and x = 1.

use super::field::{Field, FieldElem};
use super::poly::Poly;

/// numerator / (x^pole0 (x-1)^pole1), kept in normal form: the numerator does not
/// vanish at a point where the corresponding pole order is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalizedPoly {
    pub numerator: Poly,
    pub pole0: u32,
    pub pole1: u32,
}

fn x_minus_one(f: &Field) -> Poly {
    Poly::new(vec![f.neg(1), 1])
}

impl LocalizedPoly {
    pub fn zero() -> Self {
        LocalizedPoly { numerator: Poly::zero(), pole0: 0, pole1: 0 }
    }

    pub fn from_poly(p: Poly) -> Self {
        LocalizedPoly { numerator: p, pole0: 0, pole1: 0 }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn new(f: &Field, numerator: Poly, pole0: u32, pole1: u32) -> Self {
        let mut r = LocalizedPoly { numerator, pole0, pole1 };
        r.normalize(f);
        r
    }

    fn normalize(&mut self, f: &Field) {
        if self.numerator.is_zero() {
            self.pole0 = 0;
            self.pole1 = 0;
            return;
        }
        while self.pole0 > 0 && self.numerator.coeff(0) == 0 {
            self.numerator = Poly::new(self.numerator.coeffs[1..].to_vec());
            self.pole0 -= 1;
        }
        let xm1 = x_minus_one(f);
        while self.pole1 > 0 && self.numerator.eval(f, 1) == 0 {
            self.numerator = self.numerator.div_rem(f, &xm1).0;
            self.pole1 -= 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn raise(&self, f: &Field, pole0: u32, pole1: u32) -> Poly {
        let mut n = self.numerator.clone();
        if pole0 > self.pole0 {
            n = n.mul(f, &Poly::monomial((pole0 - self.pole0) as usize));
        }
        if pole1 > self.pole1 {
            n = n.mul(f, &x_minus_one(f).pow(f, pole1 - self.pole1));
        }
        n
    }

    pub fn add(&self, f: &Field, o: &Self) -> Self {
        let (a, b) = (self.pole0.max(o.pole0), self.pole1.max(o.pole1));
        Self::new(f, self.raise(f, a, b).add(f, &o.raise(f, a, b)), a, b)
    }

    pub fn sub(&self, f: &Field, o: &Self) -> Self {
        self.add(f, &o.neg(f))
    }

    pub fn neg(&self, f: &Field) -> Self {
        LocalizedPoly { numerator: self.numerator.neg(f), ..self.clone() }
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> Self {
        Self::new(f, self.numerator.scale(f, c), self.pole0, self.pole1)
    }

    pub fn mul(&self, f: &Field, o: &Self) -> Self {
        Self::new(f, self.numerator.mul(f, &o.numerator), self.pole0 + o.pole0, self.pole1 + o.pole1)
    }

    /// d/dx.
    pub fn derivative(&self, f: &Field) -> Self {
        // (N / (x^i (x-1)^j))' = (N' x (x-1) - N (i (x-1) + j x)) / (x^{i+1} (x-1)^{j+1})
        let n = &self.numerator;
        let i = self.pole0 as i64;
        let j = self.pole1 as i64;
        let x = Poly::monomial(1);
        let xm1 = x_minus_one(f);
        let lin = Poly::new(vec![f.from_int(-i), f.from_int(i + j)]);
        let num = n.derivative(f).mul(f, &x.mul(f, &xm1)).sub(f, &n.mul(f, &lin));
        Self::new(f, num, self.pole0 + 1, self.pole1 + 1)
    }

    /// Rewrite as A / (x^(p^k a) (x-1)^(p^k b)) and report whether A only involves
    /// powers of x^(p^k). Zero counts as such a function.
    pub fn is_in_pth_powers(&self, f: &Field, pk: u32) -> bool {
        let a = self.pole0.div_ceil(pk) * pk;
        let b = self.pole1.div_ceil(pk) * pk;
        self.raise(f, a, b).is_in_powers(pk as usize)
    }

    /// Evaluate at a point other than 0 and 1 where defined.
    pub fn eval(&self, f: &Field, x: FieldElem) -> Option<FieldElem> {
        let d0 = f.pow(x, self.pole0 as u64);
        let d1 = f.pow(f.sub(x, 1), self.pole1 as u64);
        let den = f.mul(d0, d1);
        if den == 0 {
            return None;
        }
        Some(f.div(self.numerator.eval(f, x), den))
    }
}

/// Square matrix over [`LocalizedPoly`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizedMatrix {
    pub n: usize,
    pub entries: Vec<LocalizedPoly>,
}

impl LocalizedMatrix {
    pub fn zero(n: usize) -> Self {
        LocalizedMatrix { n, entries: vec![LocalizedPoly::zero(); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> &LocalizedPoly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LocalizedPoly) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, f: &Field, o: &Self) -> Self {
        LocalizedMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(f, b)).collect() }
    }

    pub fn mul(&self, f: &Field, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LocalizedPoly::zero();
                for k in 0..n {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(f, &a.mul(f, b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn derivative(&self, f: &Field) -> Self {
        LocalizedMatrix { n: self.n, entries: self.entries.iter().map(|e| e.derivative(f)).collect() }
    }

    pub fn trace(&self, f: &Field) -> LocalizedPoly {
        (0..self.n).fold(LocalizedPoly::zero(), |acc, i| acc.add(f, self.get(i, i)))
    }
}
