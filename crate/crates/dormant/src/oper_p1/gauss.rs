//! The hypergeometric (Gauss) operator on P^1 minus {0, 1, infinity}: companion
//! connection, rational p-curvature, polynomial solutions.

use serde::{Deserialize, Serialize};

use crate::algebra_core::{Field, FieldElem, LocalizedMatrix, LocalizedPoly, Matrix, Poly};

/// Parameters of x(1-x) y'' + (c - (a+b+1) x) y' - a b y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussParams {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
}

impl GaussParams {
    /// Local exponents: {0, 1-c} at 0, {0, c-a-b} at 1, {a, b} at infinity.
    pub fn exponents(&self, f: &Field) -> [[FieldElem; 2]; 3] {
        let one_minus_c = f.sub(1, self.c);
        let at_one = f.sub(self.c, f.add(self.a, self.b));
        [[0, one_minus_c], [0, at_one], [self.a, self.b]]
    }

    /// Parameters whose exponent differences at 0, 1, infinity are d0, d1, dinf,
    /// taking b - a = dinf and the Fuchs relation for a + b.
    pub fn from_differences(f: &Field, d0: FieldElem, d1: FieldElem, dinf: FieldElem) -> Self {
        let c = f.sub(1, d0);
        let two_a = f.sub(f.sub(f.sub(1, d0), d1), dinf);
        let a = f.div(two_a, 2);
        GaussParams { a, b: f.add(a, dinf), c }
    }

    /// Companion matrix A with Y' = A Y for Y = (y, y').
    pub fn companion(&self, f: &Field) -> LocalizedMatrix {
        let mut m = LocalizedMatrix::zero(2);
        m.set(0, 1, LocalizedPoly::constant(1));
        // 1 / (x (1 - x)) = -1 / (x (x - 1))
        let ab = f.mul(self.a, self.b);
        m.set(1, 0, LocalizedPoly::new(f, Poly::constant(f.neg(ab)), 1, 1));
        let lin = Poly::new(vec![self.c, f.neg(f.add(f.add(self.a, self.b), 1))]);
        m.set(1, 1, LocalizedPoly::new(f, lin, 1, 1));
        m
    }

    /// Coefficients of L(x^n) = n (n - 1 + c) x^(n-1) - (n + a)(n + b) x^n.
    fn action_on_monomial(&self, f: &Field, n: u64) -> (FieldElem, FieldElem) {
        let nf = f.from_int(n as i64);
        let lower = f.mul(nf, f.add(f.sub(nf, 1), self.c));
        let diag = f.neg(f.mul(f.add(nf, self.a), f.add(nf, self.b)));
        (lower, diag)
    }

    /// Apply the operator to a polynomial.
    pub fn apply(&self, f: &Field, y: &Poly) -> Poly {
        let mut out = vec![0; y.coeffs.len() + 1];
        for (n, &cf) in y.coeffs.iter().enumerate() {
            if cf == 0 {
                continue;
            }
            let (lower, diag) = self.action_on_monomial(f, n as u64);
            if n > 0 {
                out[n - 1] = f.add(out[n - 1], f.mul(cf, lower));
            }
            out[n] = f.add(out[n], f.mul(cf, diag));
        }
        Poly::new(out)
    }
}

/// Twist of a Gauss connection realizing arbitrary exponent pairs.
///
/// The solutions are x^e0 (x-1)^e1 times Gauss solutions, where e0, e1 are the
/// first exponents at 0 and 1. Returns None when the exponent sum is not 1.
pub fn twisted_companion(f: &Field, exps: &[[FieldElem; 2]; 3]) -> Option<(GaussParams, LocalizedMatrix)> {
    let total = exps.iter().flatten().fold(0, |acc, &e| f.add(acc, e));
    if total != 1 {
        return None;
    }
    let [[x0, y0], [x1, _], [xi, yi]] = *exps;
    let shift = f.add(x0, x1);
    let g = GaussParams { a: f.add(xi, shift), b: f.add(yi, shift), c: f.sub(1, f.sub(y0, x0)) };
    // Y_twisted = h T Y with T = [[1, 0], [h'/h, 1]], h'/h = e0/x + e1/(x-1).
    let lg = LocalizedPoly::new(f, Poly::constant(x0), 1, 0).add(f, &LocalizedPoly::new(f, Poly::constant(x1), 0, 1));
    let base = g.companion(f);
    let mut t = identity(2);
    t.set(1, 0, lg.clone());
    let mut t_inv = identity(2);
    t_inv.set(1, 0, lg.neg(f));
    let mut scalar = LocalizedMatrix::zero(2);
    scalar.set(0, 0, lg.clone());
    scalar.set(1, 1, lg);
    let conj = t.mul(f, &base).mul(f, &t_inv);
    let dt = t.derivative(f).mul(f, &t_inv);
    Some((g, conj.add(f, &dt).add(f, &scalar)))
}

fn identity(n: usize) -> LocalizedMatrix {
    let mut m = LocalizedMatrix::zero(n);
    for i in 0..n {
        m.set(i, i, LocalizedPoly::constant(1));
    }
    m
}

/// p-curvature of Y' = A Y: A_1 = A, A_(k+1) = A_k' + A_k A, result A_p.
pub fn p_curvature_rational(f: &Field, a: &LocalizedMatrix) -> LocalizedMatrix {
    let mut cur = a.clone();
    for _ in 1..f.p() {
        cur = cur.derivative(f).add(f, &cur.mul(f, a));
    }
    cur
}

/// det of the trace-free part of a 2x2 matrix: -(d^2) - bc with d = (a11 - a22)/2.
pub fn traceless_det(f: &Field, m: &LocalizedMatrix) -> LocalizedPoly {
    assert_eq!(m.n, 2);
    let half = f.inv(2);
    let d = m.get(0, 0).sub(f, m.get(1, 1)).scale(f, half);
    d.mul(f, &d).add(f, &m.get(0, 1).mul(f, m.get(1, 0))).neg(f)
}

/// Kernel of the operator on polynomials of degree at most `max_deg`, as a basis
/// with pairwise distinct degrees.
pub fn polynomial_solutions(f: &Field, g: &GaussParams, max_deg: usize) -> Vec<Poly> {
    let cols = max_deg + 1;
    let mut m = Matrix::zeros(cols + 1, cols);
    for n in 0..cols {
        let (lower, diag) = g.action_on_monomial(f, n as u64);
        if n > 0 {
            m.set(n - 1, n, lower);
        }
        m.set(n, n, diag);
    }
    distinct_degree_basis(f, m.kernel(f))
}

fn distinct_degree_basis(f: &Field, vecs: Vec<Vec<FieldElem>>) -> Vec<Poly> {
    let mut basis: Vec<Vec<FieldElem>> = Vec::new();
    for mut v in vecs {
        loop {
            let Some(lead) = v.iter().rposition(|&c| c != 0) else { break };
            let Some(b) = basis.iter().find(|b| b.iter().rposition(|&c| c != 0) == Some(lead)) else {
                basis.push(v);
                break;
            };
            let factor = f.div(v[lead], b[lead]);
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
    }
    let mut out: Vec<Poly> = basis.into_iter().map(Poly::new).collect();
    out.sort_by_key(|p| p.degree());
    out
}

/// Rank over F[x^p] of the module of polynomial solutions, read off from the growth
/// of solution spaces in degree windows of width p.
pub fn polynomial_solution_rank(f: &Field, g: &GaussParams) -> usize {
    let p = f.p() as usize;
    let dim = |k: usize| polynomial_solutions(f, g, k * p - 1).len();
    let mut prev_dim = dim(2);
    let mut prev_diff = usize::MAX;
    for k in 3..40 {
        let d = dim(k);
        let diff = d - prev_dim;
        if diff == prev_diff {
            return diff;
        }
        prev_diff = diff;
        prev_dim = d;
    }
    panic!("polynomial solution counts did not stabilize");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_fermat_examples() {
        let f = Field::prime(5).unwrap();
        assert!(p_curvature_rational(&f, &LocalizedMatrix::zero(2)).is_zero());
        for c in 0..5 {
            let mut a = LocalizedMatrix::zero(2);
            a.set(0, 0, LocalizedPoly::new(&f, Poly::constant(c), 1, 0));
            assert!(p_curvature_rational(&f, &a).is_zero());
        }
    }

    #[test]
    fn scalar_curvature_over_extension_is_artin_schreier() {
        // c/x with c outside F_p: curvature (c^p - c)/x^p.
        let f = Field::new(3, 2).unwrap();
        let c = f.from_coeffs(&[0, 1]);
        let mut a = LocalizedMatrix::zero(1);
        a.set(0, 0, LocalizedPoly::new(&f, Poly::constant(c), 1, 0));
        let psi = p_curvature_rational(&f, &a);
        let expect = LocalizedPoly::new(&f, Poly::constant(f.sub(f.pow(c, 3), c)), 3, 0);
        assert_eq!(psi.get(0, 0), &expect);
    }

    #[test]
    fn operator_formula_matches_companion() {
        // y polynomial solves the equation iff (y, y') is horizontal for the companion.
        let f = Field::prime(7).unwrap();
        let g = GaussParams { a: 3, b: 5, c: 2 };
        let y = Poly::new(vec![1, 2, 0, 4, 6]);
        let ly = g.apply(&f, &y);
        let a = g.companion(&f);
        let yp = LocalizedPoly::from_poly(y.derivative(&f));
        let ypp = LocalizedPoly::from_poly(y.derivative(&f).derivative(&f));
        let rhs = a.get(1, 0).mul(&f, &LocalizedPoly::from_poly(y.clone())).add(&f, &a.get(1, 1).mul(&f, &yp));
        // y'' - rhs = L(y) / (x (1 - x))
        let diff = ypp.sub(&f, &rhs);
        let expect = LocalizedPoly::new(&f, ly.neg(&f), 1, 1);
        assert_eq!(diff, expect);
    }

    #[test]
    fn exponents_roundtrip_through_differences() {
        let f = Field::prime(7).unwrap();
        for d0 in 1..7 {
            for d1 in 1..7 {
                for di in 1..7 {
                    let g = GaussParams::from_differences(&f, d0, d1, di);
                    let e = g.exponents(&f);
                    assert_eq!(f.sub(e[0][1], e[0][0]), d0);
                    assert_eq!(f.sub(e[1][1], e[1][0]), d1);
                    assert_eq!(f.sub(e[2][1], e[2][0]), di);
                }
            }
        }
    }

    #[test]
    fn twist_with_zero_shift_is_gauss_companion() {
        let f = Field::prime(5).unwrap();
        let g = GaussParams { a: 1, b: 2, c: 1 };
        let (g2, m) = twisted_companion(&f, &g.exponents(&f)).unwrap();
        assert_eq!(g2, g);
        assert_eq!(m, g.companion(&f));
        let bad = [[0, 1], [0, 1], [0, 1]];
        assert!(twisted_companion(&f, &bad).is_none());
    }

    #[test]
    fn solutions_have_distinct_degrees_and_solve() {
        let f = Field::prime(5).unwrap();
        let g = GaussParams { a: 1, b: 1, c: 1 };
        let sols = polynomial_solutions(&f, &g, 20);
        let degs: Vec<_> = sols.iter().map(|s| s.degree()).collect();
        let mut dd = degs.clone();
        dd.dedup();
        assert_eq!(dd, degs);
        for s in &sols {
            assert!(g.apply(&f, s).is_zero());
        }
    }

    #[test]
    fn traceless_det_of_scalar_is_zero() {
        let f = Field::prime(3).unwrap();
        let mut m = LocalizedMatrix::zero(2);
        let e = LocalizedPoly::new(&f, Poly::new(vec![1, 1]), 2, 0);
        m.set(0, 0, e.clone());
        m.set(1, 1, e);
        assert!(traceless_det(&f, &m).is_zero());
    }
}
