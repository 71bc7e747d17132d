//! Truncated power series F[[t]]/(t^M).

use super::field::{Field, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    /// Exactly `M` coefficients, low degree first.
    pub coeffs: Vec<FieldElem>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries { coeffs: vec![0; order] }
    }

    pub fn constant(c: FieldElem, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>, order: usize) -> Self {
        coeffs.resize(order, 0);
        TruncSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn add(&self, f: &Field, o: &Self) -> Self {
        debug_assert_eq!(self.order(), o.order());
        TruncSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.add(a, b)).collect() }
    }

    pub fn add_assign_scaled(&mut self, f: &Field, o: &Self, c: FieldElem) {
        if c == 0 {
            return;
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            if b != 0 {
                *a = f.add(*a, f.mul(b, c));
            }
        }
    }

    pub fn sub(&self, f: &Field, o: &Self) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f.sub(a, b)).collect() }
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Product truncated at the common order. Zero coefficients are skipped, so
    /// products with sparse series (constants, monomials) are linear time.
    pub fn mul(&self, f: &Field, o: &Self) -> Self {
        let m = self.order();
        let mut out = vec![0; m];
        let (sparse, dense) = if self.nonzero_count() <= o.nonzero_count() { (self, o) } else { (o, self) };
        for (i, &a) in sparse.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in dense.coeffs[..m - i].iter().enumerate() {
                if b != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        TruncSeries { coeffs: out }
    }

    fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Apply a diagonal operator t^l -> w(l) t^l.
    pub fn map_diagonal(&self, f: &Field, weight: impl Fn(usize) -> FieldElem) -> Self {
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(l, &c)| if c == 0 { 0 } else { f.mul(c, weight(l)) })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_inverse() {
        let f = Field::prime(5).unwrap();
        let one_minus_t = TruncSeries::from_coeffs(vec![1, 4], 10);
        let geo = TruncSeries::from_coeffs(vec![1; 10], 10);
        assert_eq!(one_minus_t.mul(&f, &geo), TruncSeries::constant(1, 10));
    }
}
