//! Dense matrices over a [`Field`]: echelon forms, kernels and joint eigenspaces.

use thiserror::Error;

use super::field::{Field, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<FieldElem>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EigenError {
    #[error("matrices do not commute")]
    NonCommuting,
    #[error("matrix is not diagonalizable over the coefficient field")]
    NonDiagonalizable,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn diag(entries: &[FieldElem]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElem>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, f: &Field, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect() }
    }

    pub fn sub(&self, f: &Field, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect() }
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, f: &Field, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &Field, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, f: &Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    /// Canonical basis of the right null space: one vector per free column, with a 1
    /// in that column and zeros in the other free columns.
    pub fn kernel(&self, f: &Field) -> Vec<Vec<FieldElem>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; self.cols];
                v[fc] = 1;
                for (ri, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(ri, fc));
                }
                v
            })
            .collect()
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(ms: &[&Matrix]) -> Matrix {
        let cols = ms.first().map_or(0, |m| m.cols);
        assert!(ms.iter().all(|m| m.cols == cols));
        Matrix { rows: ms.iter().map(|m| m.rows).sum(), cols, data: ms.iter().flat_map(|m| m.data.iter().copied()).collect() }
    }

    /// Eigenvalues in the coefficient field, found by testing every field element.
    pub fn eigenvalues(&self, f: &Field) -> Vec<FieldElem> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        f.elements().filter(|&l| self.sub(f, &Matrix::identity(n).scale(f, l)).rank(f) < n).collect()
    }
}

/// Solve for coordinates of `v` in the span of `basis` (vectors of equal length).
pub fn coordinates(f: &Field, basis: &[Vec<FieldElem>], v: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let n = v.len();
    let k = basis.len();
    let mut aug = Matrix::zeros(n, k + 1);
    for i in 0..n {
        for (j, b) in basis.iter().enumerate() {
            aug.set(i, j, b[i]);
        }
        aug.set(i, k, v[i]);
    }
    let (r, pivots) = aug.rref(f);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![0; k];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(ri, k);
    }
    Some(x)
}

/// A joint eigenvalue tuple and the dimension of its joint eigenspace.
pub type JointEigen = (Vec<FieldElem>, usize);

/// Joint spectrum of pairwise commuting, individually diagonalizable matrices.
pub fn simultaneous_eigendecomp(f: &Field, ms: &[Matrix]) -> Result<Vec<JointEigen>, EigenError> {
    let Some(first) = ms.first() else { return Ok(Vec::new()) };
    let n = first.rows;
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            if a.mul(f, b) != b.mul(f, a) {
                return Err(EigenError::NonCommuting);
            }
        }
    }
    let mut spectra = Vec::new();
    for m in ms {
        let eig = m.eigenvalues(f);
        let total: usize = eig.iter().map(|&l| n - m.sub(f, &Matrix::identity(n).scale(f, l)).rank(f)).sum();
        if total != n {
            return Err(EigenError::NonDiagonalizable);
        }
        spectra.push(eig);
    }
    let mut out = Vec::new();
    let mut tuple = vec![0; ms.len()];
    joint(f, ms, &spectra, 0, &mut tuple, &mut out);
    debug_assert_eq!(out.iter().map(|x| x.1).sum::<usize>(), n);
    Ok(out)
}

fn joint(f: &Field, ms: &[Matrix], spectra: &[Vec<FieldElem>], depth: usize, tuple: &mut Vec<FieldElem>, out: &mut Vec<JointEigen>) {
    if depth == ms.len() {
        let n = ms[0].rows;
        let shifted: Vec<Matrix> =
            ms.iter().zip(tuple.iter()).map(|(m, &l)| m.sub(f, &Matrix::identity(n).scale(f, l))).collect();
        let refs: Vec<&Matrix> = shifted.iter().collect();
        let dim = n - Matrix::vstack(&refs).rank(f);
        if dim > 0 {
            out.push((tuple.clone(), dim));
        }
        return;
    }
    for &l in &spectra[depth] {
        tuple[depth] = l;
        joint(f, ms, spectra, depth + 1, tuple, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let f3 = Field::prime(3).unwrap();
        assert!(Matrix::identity(2).kernel(&f3).is_empty());
        assert_eq!(Matrix::zeros(2, 2).kernel(&f3).len(), 2);
        let f5 = Field::prime(5).unwrap();
        let a = Matrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(a.kernel(&f5), vec![vec![3, 1]]);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f = Field::prime(7).unwrap();
        let a = Matrix::from_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 1], vec![3, 6, 2, 5]]);
        for v in a.kernel(&f) {
            assert!(a.apply(&f, &v).iter().all(|&x| x == 0));
        }
        assert_eq!(a.kernel(&f).len() + a.rank(&f), 4);
    }

    #[test]
    fn eigendecomp_examples() {
        let f = Field::prime(3).unwrap();
        assert_eq!(simultaneous_eigendecomp(&f, &[Matrix::diag(&[0, 2])]).unwrap(), vec![(vec![0], 1), (vec![2], 1)]);
        assert_eq!(
            simultaneous_eigendecomp(&f, &[Matrix::diag(&[1, 1]), Matrix::diag(&[0, 2])]).unwrap(),
            vec![(vec![1, 0], 1), (vec![1, 2], 1)]
        );
        let nil = Matrix::from_rows(&[vec![0, 1], vec![0, 0]]);
        assert_eq!(simultaneous_eigendecomp(&f, &[nil]), Err(EigenError::NonDiagonalizable));
        let a = Matrix::from_rows(&[vec![1, 1], vec![0, 2]]);
        let b = Matrix::from_rows(&[vec![1, 0], vec![1, 2]]);
        assert_eq!(simultaneous_eigendecomp(&f, &[a, b]), Err(EigenError::NonCommuting));
    }

    #[test]
    fn coordinates_roundtrip() {
        let f = Field::prime(5).unwrap();
        let basis = vec![vec![1, 0, 2], vec![0, 1, 3]];
        assert_eq!(coordinates(&f, &basis, &[2, 3, 3]), Some(vec![2, 3]));
        assert_eq!(coordinates(&f, &basis, &[0, 0, 1]), None);
    }
}
