//! Frobenius descent of a dormant Gauss connection and the brute-force search for
//! the next stage on the descended bundle.

use serde::{Deserialize, Serialize};

use super::gauss::{p_curvature_rational, polynomial_solutions, GaussParams};
use super::{OperError, StageConnection};
use crate::algebra_core::{Field, FieldElem, LocalizedMatrix, LocalizedPoly, Matrix, Poly};

/// Upper bound on candidate connections examined by one [`extend_stage`] call.
pub const SEARCH_BUDGET: u64 = 20_000_000;

/// The sheaf of horizontal sections of a dormant stage-0 connection, as a bundle
/// O(k1) + O(k2) on the Frobenius twist with a frame adapted to the marked points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descended {
    /// Splitting degrees (k1, k2).
    pub degrees: [i64; 2],
    /// Polynomial solutions v1, v2 giving the frame on the affine chart; near
    /// infinity the frame is z^k_i v_i with z = x^p.
    pub basis: [Poly; 2],
    /// Stage-0 exponent representatives in [0, p) at 0, 1, infinity, in the order
    /// used by the exponent pairs of the stage.
    pub exponents: [[u64; 2]; 3],
    /// At each point, coordinates of the fiber line spanned by sections of the
    /// larger exponent.
    pub high_lines: [[FieldElem; 2]; 3],
}

impl Descended {
    /// Index (0 or 1) of the larger exponent at a point.
    pub fn high_index(&self, point: usize) -> usize {
        usize::from(self.exponents[point][1] > self.exponents[point][0])
    }
}

fn rep(f: &Field, x: FieldElem) -> u64 {
    debug_assert!(f.is_in_prime_field(x));
    x as u64
}

/// Descend a dormant Gauss connection over F_p.
pub fn cartier_descend(f: &Field, g: &GaussParams) -> Result<Descended, OperError> {
    if f.degree() != 1 {
        return Err(OperError::NotPrimeField);
    }
    let p = f.p() as usize;
    if !p_curvature_rational(f, &g.companion(f)).is_zero() {
        return Err(OperError::NotDormantStage);
    }
    let exps = g.exponents(f);
    let exponents = exps.map(|pair| pair.map(|e| rep(f, e)));
    let [ra, rb] = exponents[2];
    let class_a = (p as u64 - ra) % p as u64;
    let class_b = (p as u64 - rb) % p as u64;
    let mut max_deg = 2 * p;
    let (v1, v2) = loop {
        let sols = polynomial_solutions(f, g, max_deg);
        let first = |class: u64| sols.iter().find(|s| s.degree().unwrap() as u64 % p as u64 == class).cloned();
        if let (Some(v1), Some(v2)) = (first(class_a), first(class_b)) {
            break (v1, v2);
        }
        max_deg *= 2;
        if max_deg > 64 * p {
            return Err(OperError::NotDormantStage);
        }
    };
    let big_k = |v: &Poly| v.degree().unwrap().div_ceil(p);
    let (k1, k2) = (big_k(&v1), big_k(&v2));
    let low_coeff = |point: usize, v: &Poly, kk: usize| -> FieldElem {
        let lo = exponents[point][0].min(exponents[point][1]) as usize;
        match point {
            0 => v.coeff(lo),
            1 => v.shift(f, 1).coeff(lo),
            _ => (kk * p).checked_sub(lo).map_or(0, |i| v.coeff(i)),
        }
    };
    let high_lines = [0, 1, 2].map(|pt| {
        let u1 = low_coeff(pt, &v1, k1);
        let u2 = low_coeff(pt, &v2, k2);
        debug_assert!(u1 != 0 || u2 != 0);
        [f.neg(u2), u1]
    });
    Ok(Descended { degrees: [-(k1 as i64), -(k2 as i64)], basis: [v1, v2], exponents, high_lines })
}

/// All 2x2 matrices over F_p with `line` as eigenvector of eigenvalue `-e_high`
/// and trace `-(e_low + e_high)`.
fn residue_family(f: &Field, line: [FieldElem; 2], e_low: u64, e_high: u64) -> Vec<Matrix> {
    let lam = f.from_int(-(e_high as i64));
    let tr = f.from_int(-((e_low + e_high) as i64));
    let p = f.p();
    let mut out = Vec::new();
    for r00 in 0..p {
        for r01 in 0..p {
            for r10 in 0..p {
                let r11 = f.sub(tr, r00);
                let m = Matrix::from_rows(&[vec![r00, r01], vec![r10, r11]]);
                let img = m.apply(f, &line);
                if img[0] == f.mul(lam, line[0]) && img[1] == f.mul(lam, line[1]) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Log connections on the descended bundle with residues prescribed by the
/// digit data and vanishing p-curvature.
///
/// `digits[pt]` are the next-digit exponents, aligned with `desc.exponents[pt]`.
/// In the frame (s1, s2) the connection is nabla s_j = sum_i G_ij / (z (z-1)) s_i dz
/// with deg G_ij <= 1 + k_i - k_j; its residues are -G(0) at 0, G(1) at 1 and
/// -k_j delta_ij - [z^(1 + k_i - k_j)] G_ij at infinity.
pub fn extend_stage(f: &Field, desc: &Descended, digits: &[[u64; 2]; 3], stage: u32) -> Result<Vec<StageConnection>, OperError> {
    let families: Vec<Vec<Matrix>> = (0..3)
        .map(|pt| {
            let hi = desc.high_index(pt);
            residue_family(f, desc.high_lines[pt], digits[pt][1 - hi], digits[pt][hi])
        })
        .collect();
    let k = desc.degrees;
    let bound = |i: usize, j: usize| 1 + k[i] - k[j];
    let interior: Vec<(usize, usize, usize)> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .filter(|&(i, j)| bound(i, j) >= 2)
        .map(|(i, j)| (i, j, bound(i, j) as usize - 1))
        .collect();
    let n_interior: u32 = interior.iter().map(|x| x.2 as u32).sum();
    let p = f.p() as u64;
    let combos = p.checked_pow(n_interior).unwrap_or(u64::MAX);
    let total = (families[0].len() as u64).saturating_mul(families[1].len() as u64).saturating_mul(combos);
    if total > SEARCH_BUDGET {
        return Err(OperError::BudgetExceeded { candidates: total });
    }
    let mut found = Vec::new();
    for r0 in &families[0] {
        let g0 = r0.scale(f, f.neg(1));
        'pairs: for g1 in &families[1] {
            for i in 0..2 {
                for j in 0..2 {
                    let d = bound(i, j);
                    if d < 0 && (g0.get(i, j) != 0 || g1.get(i, j) != 0) {
                        continue 'pairs;
                    }
                    if d == 0 && g0.get(i, j) != g1.get(i, j) {
                        continue 'pairs;
                    }
                }
            }
            for code in 0..combos {
                let mut rest = code;
                let mut coeffs: [[Vec<FieldElem>; 2]; 2] = Default::default();
                for i in 0..2 {
                    for j in 0..2 {
                        let d = bound(i, j);
                        if d < 0 {
                            continue;
                        }
                        let mut c = vec![g0.get(i, j)];
                        if d >= 1 {
                            let inner = interior.iter().find(|x| x.0 == i && x.1 == j).map_or(0, |x| x.2);
                            for _ in 0..inner {
                                c.push((rest % p) as FieldElem);
                                rest /= p;
                            }
                            let partial = c.iter().fold(0, |acc, &x| f.add(acc, x));
                            c.push(f.sub(g1.get(i, j), partial));
                        }
                        coeffs[i][j] = c;
                    }
                }
                let mut r_inf = Matrix::zeros(2, 2);
                for i in 0..2 {
                    for j in 0..2 {
                        let top = coeffs[i][j].last().copied().unwrap_or(0);
                        let diag = if i == j { f.from_int(-k[j]) } else { 0 };
                        r_inf.set(i, j, f.sub(diag, top));
                    }
                }
                if !families[2].contains(&r_inf) {
                    continue;
                }
                let system = system_matrix(f, &coeffs);
                if p_curvature_rational(f, &system).is_zero() {
                    found.push(StageConnection {
                        stage,
                        bundle: desc.degrees,
                        matrix: system,
                        exponents: *digits,
                        scalar: None,
                    });
                }
            }
        }
    }
    if found.is_empty() {
        return Err(OperError::EmptyExtension);
    }
    Ok(found)
}

/// Coefficient vectors solve f' = M f with M = -G / (z (z-1)).
fn system_matrix(f: &Field, coeffs: &[[Vec<FieldElem>; 2]; 2]) -> LocalizedMatrix {
    let mut m = LocalizedMatrix::zero(2);
    for i in 0..2 {
        for j in 0..2 {
            let g = Poly::new(coeffs[i][j].clone());
            m.set(i, j, LocalizedPoly::new(f, g.neg(f), 1, 1));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dormant_params(f: &Field) -> Vec<GaussParams> {
        let p = f.p();
        let mut out = Vec::new();
        for d0 in 1..p {
            for d1 in 1..p {
                for di in 1..p {
                    let g = GaussParams::from_differences(f, d0, d1, di);
                    if p_curvature_rational(f, &g.companion(f)).is_zero() {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    fn wronskian(f: &Field, a: &Poly, b: &Poly) -> Poly {
        a.mul(f, &b.derivative(f)).sub(f, &a.derivative(f).mul(f, b))
    }

    #[test]
    fn descended_degree_follows_local_lattices() {
        // -(k1 + k2) = (sum of exponent representatives - 1) / p
        for p in [3u32, 5, 7] {
            let f = Field::prime(p).unwrap();
            let cases = dormant_params(&f);
            assert!(!cases.is_empty());
            for g in cases {
                let d = cartier_descend(&f, &g).unwrap();
                let s: u64 = d.exponents.iter().flatten().sum();
                assert_eq!((s - 1) % p as u64, 0);
                assert_eq!(-(d.degrees[0] + d.degrees[1]), ((s - 1) / p as u64) as i64, "{g:?}");
            }
        }
    }

    #[test]
    fn pullback_recovers_the_connection() {
        // The Wronskian matrix of the frame trivializes the companion connection, and
        // its determinant has exactly the orders forced by the exponents at 0 and 1.
        let f = Field::prime(5).unwrap();
        for g in dormant_params(&f) {
            let d = cartier_descend(&f, &g).unwrap();
            let [v1, v2] = &d.basis;
            let a = g.companion(&f);
            for v in [v1, v2] {
                let y = LocalizedPoly::from_poly(v.clone());
                let yp = LocalizedPoly::from_poly(v.derivative(&f));
                let ypp = LocalizedPoly::from_poly(v.derivative(&f).derivative(&f));
                let rhs = a.get(1, 0).mul(&f, &y).add(&f, &a.get(1, 1).mul(&f, &yp));
                assert_eq!(ypp, rhs);
            }
            let w = wronskian(&f, v1, v2);
            let m0 = d.exponents[0][1] as usize - 1;
            let m1 = d.exponents[1][1] as usize - 1;
            let model = Poly::monomial(m0).mul(&f, &Poly::new(vec![4, 1]).pow(&f, m1 as u32));
            let lead = w.coeff(w.degree().unwrap());
            assert_eq!(w, model.scale(&f, lead), "{g:?}");
        }
    }

    #[test]
    fn high_lines_are_kernels_of_the_low_coefficient() {
        let f = Field::prime(7).unwrap();
        for g in dormant_params(&f) {
            let d = cartier_descend(&f, &g).unwrap();
            let [c1, c2] = d.high_lines[0];
            let mix = d.basis[0].scale(&f, c1).add(&f, &d.basis[1].scale(&f, c2));
            assert_eq!(mix.coeff(0), 0);
            let [e1, e2] = d.high_lines[1];
            let mix1 = d.basis[0].scale(&f, e1).add(&f, &d.basis[1].scale(&f, e2)).shift(&f, 1);
            assert_eq!(mix1.coeff(0), 0);
        }
    }

    #[test]
    fn non_dormant_stage_is_rejected() {
        let f = Field::prime(5).unwrap();
        let bad = (1..5)
            .flat_map(|a| (1..5).map(move |b| (a, b)))
            .map(|(d0, d1)| GaussParams::from_differences(&f, d0, d1, 1))
            .find(|g| !p_curvature_rational(&f, &g.companion(&f)).is_zero())
            .unwrap();
        assert_eq!(cartier_descend(&f, &bad), Err(OperError::NotDormantStage));
    }

    #[test]
    fn residue_family_has_p_members() {
        let f = Field::prime(5).unwrap();
        let fam = residue_family(&f, [1, 2], 3, 1);
        assert_eq!(fam.len(), 5);
        for m in fam {
            assert_eq!(m.apply(&f, &[1, 2]), vec![4, 3]);
        }
    }
}
