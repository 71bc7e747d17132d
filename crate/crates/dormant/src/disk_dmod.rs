//! Level-m logarithmic divided-power operators on the formal disk and finite-rank
//! modules over truncated power series.
//!
//! A module of rank n is F[[t]]^n / t^M with basis e_1..e_n. The operator
//! ∂^⟨j⟩ acts on functions by t^l -> q_j! C(l, j) t^l and on a section f e_i by the
//! Leibniz rule
//!
//! ∂^⟨j⟩(f e_i) = Σ_{j1 + j2 = j} {j; j1} ∂^⟨j1⟩(f) ∂^⟨j2⟩(e_i),  {j; j1} = q_j! / (q_j1! q_j2!),
//!
//! so a module is determined by the series matrices B_j with ∂^⟨j⟩(e_i) = Σ_k B_j[k][i] e_k.
//! Log operators preserve every ideal t^W F[[t]], which keeps truncation exact.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::algebra_core::combinat::{binom_signed, factorial_ratio_mod_p, lucas_binom, q_decomp};
use crate::algebra_core::field::{Field, FieldElem};
use crate::algebra_core::matrix::{coordinates, simultaneous_eigendecomp, EigenError, Matrix};
use crate::algebra_core::series::TruncSeries;
use crate::radii::{ExponentMultiset, ResidueClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DmodError {
    #[error("generator matrices do not commute")]
    NonCommutingGenerators,
    #[error("generators do not extend to a level-{level} structure: relation ∂^⟨{left}⟩·∂^⟨{right}⟩ fails")]
    InconsistentAlgebra { level: u32, left: u64, right: u64 },
    #[error("truncation order {order} is not a positive multiple of {period}")]
    BadTruncation { order: usize, period: u64 },
    #[error("expected {expected} generator matrices, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("solution filtration changes when the truncation order is doubled")]
    TruncationUnstable,
    #[error("monodromy is not simultaneously diagonalizable over F_p")]
    NonSplitLocal,
    #[error("the p^(m+1)-curvature does not vanish")]
    NotDormant,
    #[error("level {0} exceeds the module level")]
    LevelOutOfRange(u32),
}

/// Coefficients c_j, all nonzero mod p, with ∂^⟨j1⟩ ∂^⟨j2⟩ = Σ_j c_j ∂^⟨j⟩ at level m.
pub fn structure_constants(j1: u64, j2: u64, m: u32, p: u64) -> BTreeMap<u64, u64> {
    let q = |j: u64| q_decomp(j, m, p).quotient;
    let mut out = BTreeMap::new();
    for j in j1.max(j2)..=j1 + j2 {
        let c = factorial_ratio_mod_p(&[j, q(j1), q(j2)], &[j1 + j2 - j, j - j1, j - j2, q(j)], p);
        if c != 0 {
            out.insert(j, c);
        }
    }
    out
}

/// {j; j1} = q_j! / (q_j1! q_{j-j1}!) mod p.
fn leibniz_coeff(j: u64, j1: u64, m: u32, p: u64) -> u64 {
    let q = |x: u64| q_decomp(x, m, p).quotient;
    factorial_ratio_mod_p(&[q(j)], &[q(j1), q(j - j1)], p)
}

/// Square matrix of truncated series; column i is the image of e_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub n: usize,
    pub entries: Vec<TruncSeries>,
}

impl SeriesMatrix {
    pub fn zero(n: usize, order: usize) -> Self {
        SeriesMatrix { n, entries: vec![TruncSeries::zero(order); n * n] }
    }

    /// Constant matrix.
    pub fn constant(m: &Matrix, order: usize) -> Self {
        assert_eq!(m.rows, m.cols);
        SeriesMatrix { n: m.rows, entries: m.data.iter().map(|&c| TruncSeries::constant(c, order)).collect() }
    }

    pub fn get(&self, row: usize, col: usize) -> &TruncSeries {
        &self.entries[row * self.n + col]
    }

    pub fn column(&self, col: usize) -> Vec<TruncSeries> {
        (0..self.n).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    /// Constant terms.
    pub fn fiber(&self) -> Matrix {
        Matrix { rows: self.n, cols: self.n, data: self.entries.iter().map(|s| s.constant_term()).collect() }
    }

    fn from_columns(cols: &[Vec<TruncSeries>]) -> Self {
        let n = cols.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in cols {
                entries.push(c[r].clone());
            }
        }
        SeriesMatrix { n, entries }
    }
}

/// A section Σ f_i e_i.
pub type Section = Vec<TruncSeries>;

/// A rank-n module over F[[t]]/t^M with a level-m operator action.
#[derive(Debug, Clone)]
pub struct DiskDModule {
    pub field: Field,
    pub level: u32,
    pub rank: usize,
    pub order: usize,
    /// actions[j] = B_j for 0 <= j <= p^{m+1}.
    actions: Vec<SeriesMatrix>,
}

#[derive(Debug, Serialize)]
pub struct DiskDModuleDump {
    pub p: u32,
    pub field_degree: u32,
    pub level: u32,
    pub rank: usize,
    pub truncation: usize,
    /// generators[a][row][col] = coefficient list of ∂^⟨p^a⟩(e_col) along e_row.
    pub generators: Vec<Vec<Vec<Vec<u32>>>>,
}

fn pu(f: &Field) -> u64 {
    f.p() as u64
}

/// ∂^⟨j⟩ on a function at level m (trivial structure on O).
fn act_on_function(f: &Field, s: &TruncSeries, j: u64, m: u32) -> TruncSeries {
    let p = pu(f);
    let qf = q_decomp(j, m, p).factorial_mod_p;
    if qf == 0 {
        return TruncSeries::zero(s.order());
    }
    s.map_diagonal(f, |l| (qf * lucas_binom(l as u64, j, p) % p) as u32)
}

/// Apply ∂^⟨j⟩ to a section using action matrices B_0..B_j.
fn apply_with(f: &Field, actions: &[SeriesMatrix], m: u32, j: u64, sec: &Section) -> Section {
    let p = pu(f);
    let n = sec.len();
    let order = sec.first().map_or(0, |s| s.order());
    let mut out = vec![TruncSeries::zero(order); n];
    for j1 in 0..=j {
        let lc = leibniz_coeff(j, j1, m, p) as u32;
        if lc == 0 {
            continue;
        }
        let b = &actions[(j - j1) as usize];
        for (i, fi) in sec.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            let d = act_on_function(f, fi, j1, m);
            if d.is_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate() {
                let bk = b.get(k, i);
                if bk.is_zero() {
                    continue;
                }
                slot.add_assign_scaled(f, &d.mul(f, bk), lc);
            }
        }
    }
    out
}

fn basis_section(n: usize, order: usize, i: usize) -> Section {
    (0..n).map(|k| TruncSeries::constant(if k == i { 1 } else { 0 }, order)).collect()
}

impl DiskDModule {
    pub fn p(&self) -> u64 {
        pu(&self.field)
    }

    /// p^{m+1}.
    pub fn period(&self) -> u64 {
        self.p().pow(self.level + 1)
    }

    pub fn action(&self, j: u64) -> &SeriesMatrix {
        &self.actions[j as usize]
    }

    /// Apply ∂^⟨j⟩ (j <= p^{m+1}) to a section.
    pub fn apply(&self, j: u64, sec: &Section) -> Section {
        apply_with(&self.field, &self.actions, self.level, j, sec)
    }

    pub fn generators(&self) -> Vec<SeriesMatrix> {
        (0..=self.level).map(|a| self.actions[self.p().pow(a) as usize].clone()).collect()
    }

    pub fn dump(&self) -> DiskDModuleDump {
        DiskDModuleDump {
            p: self.field.p(),
            field_degree: self.field.degree(),
            level: self.level,
            rank: self.rank,
            truncation: self.order,
            generators: self
                .generators()
                .iter()
                .map(|g| (0..g.n).map(|r| (0..g.n).map(|c| g.get(r, c).coeffs.clone()).collect()).collect())
                .collect(),
        }
    }
}

/// Extend generator actions ∂^⟨p^a⟩ (a = 0..m) to all ∂^⟨j⟩ with j <= p^{m+1}, then
/// re-verify every relation ∂^⟨p^a⟩ ∂^⟨j⟩ = Σ c_k ∂^⟨k⟩ in range.
pub fn complete_actions(field: &Field, level: u32, order: usize, generators: &[SeriesMatrix]) -> Result<DiskDModule, DmodError> {
    let p = pu(field);
    let period = p.pow(level + 1);
    if order == 0 || !(order as u64).is_multiple_of(period) {
        return Err(DmodError::BadTruncation { order, period });
    }
    if generators.len() != level as usize + 1 {
        return Err(DmodError::WrongGeneratorCount { expected: level as usize + 1, got: generators.len() });
    }
    let n = generators[0].n;
    let f = field;

    let mut actions: Vec<SeriesMatrix> = Vec::with_capacity(period as usize + 1);
    actions.push(SeriesMatrix::constant(&Matrix::identity(n), order));
    for big in 1..=period {
        if big < period && big.is_power_of(p) {
            let a = big.ilog(p) as usize;
            actions.push(generators[a].clone());
            continue;
        }
        let (a_pow, consts) = (0..=level)
            .map(|a| p.pow(a))
            .filter(|&pa| pa < big)
            .map(|pa| (pa, structure_constants(pa, big - pa, level, p)))
            .find(|(_, c)| c.contains_key(&big))
            .expect("some generator has a unit leading coefficient");
        let top_inv = f.inv(consts[&big] as u32);
        let cols: Vec<Section> = (0..n)
            .map(|i| {
                let inner = actions[(big - a_pow) as usize].column(i);
                let mut v = apply_with(f, &actions, level, a_pow, &inner);
                for (&k, &c) in consts.iter().filter(|(&k, _)| k != big) {
                    let col = actions[k as usize].column(i);
                    for (slot, s) in v.iter_mut().zip(&col) {
                        slot.add_assign_scaled(f, s, f.neg(c as u32));
                    }
                }
                v.into_iter().map(|s| s.scale(f, top_inv)).collect()
            })
            .collect();
        actions.push(SeriesMatrix::from_columns(&cols));
    }

    for a in 0..=level {
        for b in a + 1..=level {
            let (pa, pb) = (p.pow(a), p.pow(b));
            for i in 0..n {
                let e = basis_section(n, order, i);
                let ab = apply_with(f, &actions, level, pa, &apply_with(f, &actions, level, pb, &e));
                let ba = apply_with(f, &actions, level, pb, &apply_with(f, &actions, level, pa, &e));
                if ab != ba {
                    return Err(DmodError::NonCommutingGenerators);
                }
            }
        }
    }
    for a in 0..=level {
        let pa = p.pow(a);
        for j in 0..=(period - pa) {
            let consts = structure_constants(pa, j, level, p);
            for i in 0..n {
                let lhs = apply_with(f, &actions, level, pa, &actions[j as usize].column(i));
                let mut rhs = vec![TruncSeries::zero(order); n];
                for (&k, &c) in &consts {
                    let col = actions[k as usize].column(i);
                    for (slot, s) in rhs.iter_mut().zip(&col) {
                        slot.add_assign_scaled(f, s, c as u32);
                    }
                }
                if lhs != rhs {
                    return Err(DmodError::InconsistentAlgebra { level, left: pa, right: j });
                }
            }
        }
    }
    Ok(DiskDModule { field: field.clone(), level, rank: n, order, actions })
}

trait PowerOf {
    fn is_power_of(self, p: u64) -> bool;
}

impl PowerOf for u64 {
    fn is_power_of(self, p: u64) -> bool {
        let mut x = self;
        while x > 1 && x.is_multiple_of(p) {
            x /= p;
        }
        x == 1
    }
}

/// Eigenvalue of ∂^⟨j⟩ on t^l in the rank-one model with exponent d̃.
pub fn local_model_eigenvalue(l: u64, d_lift: u64, j: u64, m: u32, p: u64) -> u64 {
    q_decomp(j, m, p).factorial_mod_p * binom_signed(l as i64 - d_lift as i64, j, p) % p
}

/// The rank-one model O_{⊘,d}: ∂^⟨j⟩ t^l = q_j! C(l - d̃, j) t^l with 0 <= d̃ < p^{m+1}.
pub fn local_model(field: &Field, d: ResidueClass, level: u32, order: usize) -> Result<DiskDModule, DmodError> {
    let p = pu(field);
    assert_eq!(d.p as u64, p, "residue class over a different prime");
    let d_lift = d.value % p.pow(level + 1);
    let gens: Vec<SeriesMatrix> = (0..=level)
        .map(|a| {
            let c = local_model_eigenvalue(0, d_lift, p.pow(a), level, p) as u32;
            SeriesMatrix::constant(&Matrix::diag(&[c]), order)
        })
        .collect();
    complete_actions(field, level, order, &gens)
}

/// Block-diagonal sum of modules with equal field, level and truncation.
pub fn direct_sum(mods: &[DiskDModule]) -> DiskDModule {
    let first = &mods[0];
    let n: usize = mods.iter().map(|m| m.rank).sum();
    let order = first.order;
    let count = first.actions.len();
    let actions = (0..count)
        .map(|j| {
            let mut out = SeriesMatrix::zero(n, order);
            let mut off = 0;
            for m in mods {
                assert_eq!((m.level, m.order), (first.level, order), "incompatible summands");
                let b = &m.actions[j];
                for r in 0..m.rank {
                    for c in 0..m.rank {
                        out.entries[(off + r) * n + off + c] = b.get(r, c).clone();
                    }
                }
                off += m.rank;
            }
            out
        })
        .collect();
    DiskDModule { field: first.field.clone(), level: first.level, rank: n, order, actions }
}

/// The p^{m+1}-curvature, normalised as the action of ∂^⟨p^{m+1}⟩.
///
/// The level-raising map multiplies ∂^⟨j⟩ by the unit q_j! for j < p^{m+1} and kills
/// ∂^⟨p^{m+1}⟩ (factor p!), so the degree-p^{m+1} generator of the splitting is
/// ∂^⟨p^{m+1}⟩ up to a unit. At m = 0 this is the classical ∇(∂)^p - ∇(∂) for the log
/// derivation ∂ = t d/dt. By the Leibniz rule the operator is F[[t]]-linear, so it is
/// the series matrix B_{p^{m+1}}.
pub fn p_curvature(module: &DiskDModule) -> SeriesMatrix {
    module.actions.last().expect("completed module").clone()
}

/// Restrict the generators to levels <= a and complete at level a.
pub fn level_reduce(module: &DiskDModule, a: u32) -> Result<DiskDModule, DmodError> {
    if a > module.level {
        return Err(DmodError::LevelOutOfRange(a));
    }
    if a == module.level {
        return Ok(module.clone());
    }
    let gens: Vec<SeriesMatrix> = module.generators().into_iter().take(a as usize + 1).collect();
    let period = module.p().pow(a + 1) as usize;
    let order = module.order / period * period;
    complete_actions(&module.field, a, order, &gens)
}

/// F-basis of a stage of the solution filtration, as flat vectors indexed by
/// `component * window + degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolBasis {
    pub stage: u32,
    pub window: usize,
    pub rank: usize,
    pub vectors: Vec<Vec<FieldElem>>,
}

impl SolBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Degrees l such that t^l e_i is a basis vector, when the basis is monomial.
    pub fn monomials(&self) -> Option<Vec<(usize, usize)>> {
        self.vectors
            .iter()
            .map(|v| {
                let nz: Vec<usize> = v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i).collect();
                (nz.len() == 1).then(|| (nz[0] / self.window, nz[0] % self.window))
            })
            .collect()
    }
}

fn flatten(sec: &Section, window: usize) -> Vec<FieldElem> {
    sec.iter().flat_map(|s| s.coeffs[..window].iter().copied()).collect()
}

fn unflatten(v: &[FieldElem], n: usize, window: usize, order: usize) -> Section {
    (0..n).map(|i| TruncSeries::from_coeffs(v[i * window..(i + 1) * window].to_vec(), order)).collect()
}

/// Matrix of ∂^⟨j⟩ on sections mod t^W, columns indexed by `component * W + degree`.
fn action_matrix(module: &DiskDModule, j: u64, window: usize) -> Matrix {
    let n = module.rank;
    let dim = n * window;
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..n {
        for l in 0..window {
            let mut sec: Section = vec![TruncSeries::zero(module.order); n];
            sec[i].coeffs[l] = 1;
            let img = flatten(&module.apply(j, &sec), window);
            for (r, &c) in img.iter().enumerate() {
                m.set(r, i * window + l, c);
            }
        }
    }
    m
}

fn canonical_span(f: &Field, vectors: &[Vec<FieldElem>], len: usize) -> Vec<Vec<FieldElem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, piv) = Matrix::from_rows(vectors).rref(f);
    (0..piv.len()).map(|i| r.row(i).to_vec()).filter(|row| row.len() == len).collect()
}

/// Stage a of the solution filtration: joint kernel of ∂^⟨p^b⟩ for b < a.
///
/// The kernel is taken on sections mod t^M and then projected to the window
/// [0, M - p^{m+1}); kernel vectors created by truncation live in the top degrees and
/// project away.
pub fn sol_filtration(module: &DiskDModule, a: u32) -> Result<SolBasis, DmodError> {
    if a > module.level + 1 {
        return Err(DmodError::LevelOutOfRange(a));
    }
    let f = &module.field;
    let n = module.rank;
    let full = module.order;
    let window = full - module.period() as usize;
    let kernel_full: Vec<Vec<FieldElem>> = if a == 0 {
        Matrix::identity(n * full).data.chunks(n * full).map(|c| c.to_vec()).collect()
    } else {
        let mats: Vec<Matrix> = (0..a).map(|b| action_matrix(module, module.p().pow(b), full)).collect();
        let refs: Vec<&Matrix> = mats.iter().collect();
        Matrix::vstack(&refs).kernel(f)
    };
    let projected: Vec<Vec<FieldElem>> = kernel_full
        .iter()
        .map(|v| (0..n).flat_map(|i| v[i * full..i * full + window].iter().copied()).collect())
        .collect();
    let vectors = canonical_span(f, &projected, n * window);
    Ok(SolBasis { stage: a, window, rank: n, vectors })
}

/// Stage a with a stability check: the filtration computed from `build(M)` and
/// `build(2M)` must agree on the common window.
pub fn sol_filtration_checked(build: impl Fn(usize) -> DiskDModule, order: usize, a: u32) -> Result<SolBasis, DmodError> {
    let small = sol_filtration(&build(order), a)?;
    let large = sol_filtration(&build(2 * order), a)?;
    let f = build(order).field;
    let n = small.rank;
    let cut: Vec<Vec<FieldElem>> = large
        .vectors
        .iter()
        .map(|v| (0..n).flat_map(|i| v[i * large.window..i * large.window + small.window].iter().copied()).collect())
        .collect();
    if canonical_span(&f, &cut, n * small.window) != small.vectors {
        return Err(DmodError::TruncationUnstable);
    }
    Ok(small)
}

/// Matrix of ∂^⟨p^a⟩ on the basis of F^[a] (columns are images of basis vectors).
pub fn induced_connection(module: &DiskDModule, a: u32) -> Result<(SolBasis, Matrix), DmodError> {
    let basis = sol_filtration(module, a)?;
    let f = &module.field;
    let w = basis.window;
    let k = basis.dim();
    let mut m = Matrix::zeros(k, k);
    for (c, v) in basis.vectors.iter().enumerate() {
        let sec = unflatten(v, module.rank, w, module.order);
        let img = flatten(&module.apply(module.p().pow(a), &sec), w);
        let coords = coordinates(f, &basis.vectors, &img).expect("the operator preserves F^[a]");
        for (r, x) in coords.into_iter().enumerate() {
            m.set(r, c, x);
        }
    }
    Ok((basis, m))
}

/// Kernel of the induced connection, as vectors in the ambient window.
pub fn induced_kernel(module: &DiskDModule, a: u32) -> Result<SolBasis, DmodError> {
    let (basis, m) = induced_connection(module, a)?;
    let f = &module.field;
    let len = module.rank * basis.window;
    let vecs: Vec<Vec<FieldElem>> = m
        .kernel(f)
        .iter()
        .map(|coef| {
            let mut v = vec![0; len];
            for (c, b) in coef.iter().zip(&basis.vectors) {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(*c, y));
                }
            }
            v
        })
        .collect();
    Ok(SolBasis { stage: a + 1, window: basis.window, rank: module.rank, vectors: canonical_span(f, &vecs, len) })
}

/// Fibres at t = 0 of the generator actions ∂^⟨p^a⟩, a = 0..m.
pub fn monodromy(module: &DiskDModule) -> Vec<Matrix> {
    module.generators().iter().map(|g| g.fiber()).collect()
}

/// Local exponent multiset from the joint spectrum of the monodromy.
///
/// Each joint eigenvalue tuple (h_0..h_m) must consist of elements with h^p = h; the
/// exponent is d = -Σ p^a h_a mod p^{m+1}.
pub fn exponent(module: &DiskDModule) -> Result<ExponentMultiset, DmodError> {
    if !p_curvature(module).is_zero() {
        return Err(DmodError::NotDormant);
    }
    let f = &module.field;
    let p = module.p();
    let spectrum = simultaneous_eigendecomp(f, &monodromy(module)).map_err(|e| match e {
        EigenError::NonCommuting | EigenError::NonDiagonalizable => DmodError::NonSplitLocal,
    })?;
    let modulus = p.pow(module.level + 1) as i64;
    let mut entries = Vec::new();
    for (tuple, mult) in spectrum {
        if tuple.iter().any(|&h| f.sub(f.frobenius(h), h) != 0) {
            return Err(DmodError::NonSplitLocal);
        }
        let c: i64 = tuple.iter().enumerate().map(|(a, &h)| (p.pow(a as u32) * h as u64) as i64).sum();
        for _ in 0..mult {
            entries.push((-c).rem_euclid(modulus));
        }
    }
    Ok(ExponentMultiset::new(p as u32, module.level + 1, &entries))
}

/// R_a: number of (point, j' < j) with digit a of d_j - d_j' in {0, p-1}.
pub fn count_ra(points: &[ExponentMultiset], a: u32) -> u64 {
    let mut total = 0;
    for e in points {
        for j in 0..e.entries.len() {
            for jp in 0..j {
                let diff = ResidueClass::new(e.p, e.level, e.entries[j] as i64 - e.entries[jp] as i64);
                let dig = diff.digit(a);
                if dig == 0 || dig == e.p as u64 - 1 {
                    total += 1;
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    /// Exact rational evaluation of the structure constant, reduced mod p.
    fn oracle_constant(j1: u64, j2: u64, j: u64, m: u32, p: u64) -> u64 {
        let fact = |n: u64| (1..=n).fold(BigInt::from(1), |acc, k| acc * k);
        let q = |x: u64| x / p.pow(m);
        let mut num = fact(j) * fact(q(j1)) * fact(q(j2));
        let mut den = fact(j1 + j2 - j) * fact(j - j1) * fact(j - j2) * fact(q(j));
        let pb = BigInt::from(p);
        let zero = BigInt::from(0);
        while &num % &pb == zero && &den % &pb == zero && num != zero {
            num /= &pb;
            den /= &pb;
        }
        assert!(&den % &pb != zero, "not p-integral");
        let n = u64::try_from(num % &pb).unwrap();
        let d = u64::try_from(den % &pb).unwrap();
        n * crate::algebra_core::field::pow_mod(d, p - 2, p) % p
    }

    #[test]
    fn structure_constants_match_exact_integers() {
        for p in [3u64, 5] {
            for m in 0..3u32 {
                let top = p.pow(m + 1).min(30);
                for j1 in 0..=top {
                    for j2 in 0..=top {
                        let sc = structure_constants(j1, j2, m, p);
                        for j in j1.max(j2)..=j1 + j2 {
                            assert_eq!(sc.get(&j).copied().unwrap_or(0), oracle_constant(j1, j2, j, m, p));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn structure_constant_examples() {
        assert_eq!(structure_constants(1, 1, 0, 3), BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(structure_constants(1, 3, 1, 3), BTreeMap::from([(4, 1)]));
        assert_eq!(structure_constants(7, 0, 1, 3), BTreeMap::from([(7, 1)]));
    }

    #[test]
    fn structure_constants_reproduce_monomial_eigenvalues() {
        // q_j1! C(l, j1) q_j2! C(l, j2) = Σ c_j q_j! C(l, j)
        for p in [3u64, 5] {
            for m in 0..2u32 {
                let top = p.pow(m + 1);
                for j1 in 0..=top {
                    for j2 in 0..=top {
                        let sc = structure_constants(j1, j2, m, p);
                        for l in 0..60u64 {
                            let ev = |j| local_model_eigenvalue(l, 0, j, m, p);
                            let lhs = ev(j1) * ev(j2) % p;
                            let rhs = sc.iter().map(|(&j, &c)| c * ev(j)).sum::<u64>() % p;
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn local_model_completes_to_diagonal_formula() {
        let f = Field::prime(3).unwrap();
        for m in 0..3u32 {
            let period = 3u64.pow(m + 1);
            for d in 0..period {
                let module = local_model(&f, ResidueClass::new(3, m + 1, d as i64), m, 2 * period as usize).unwrap();
                for j in 0..=period {
                    let b = module.action(j);
                    let c = local_model_eigenvalue(0, d, j, m, 3) as u32;
                    assert_eq!(b.get(0, 0), &TruncSeries::constant(c, module.order), "d={d} j={j}");
                }
            }
        }
    }

    #[test]
    fn local_model_eigenvalue_examples() {
        // d̃ = 2, p = 3, m = 1: ∂^⟨3⟩ on t^5 is C(3, 3) = 1; ∂^⟨1⟩ on t^0 is C(-2, 1) = 1.
        assert_eq!(local_model_eigenvalue(5, 2, 3, 1, 3), 1);
        assert_eq!(local_model_eigenvalue(0, 2, 1, 1, 3), 1);
    }

    #[test]
    fn trivial_structure_has_zero_curvature() {
        let f = Field::prime(5).unwrap();
        for m in 0..2 {
            let module = local_model(&f, ResidueClass::new(5, m + 1, 0), m, 2 * 5usize.pow(m + 1)).unwrap();
            assert!(p_curvature(&module).is_zero());
        }
    }

    #[test]
    fn rank_one_twist_curvature_is_artin_schreier() {
        let f = Field::new(3, 2).unwrap();
        for c in f.elements() {
            let gen = SeriesMatrix::constant(&Matrix::diag(&[c]), 6);
            let module = complete_actions(&f, 0, 6, &[gen]).unwrap();
            let expect = f.sub(f.frobenius(c), c);
            assert_eq!(p_curvature(&module), SeriesMatrix::constant(&Matrix::diag(&[expect]), 6));
        }
    }

    #[test]
    fn non_dormant_level_zero_does_not_extend() {
        let f = Field::new(3, 2).unwrap();
        let c = 3; // outside F_3
        let gens = vec![SeriesMatrix::constant(&Matrix::diag(&[c]), 9), SeriesMatrix::constant(&Matrix::diag(&[0]), 9)];
        assert!(matches!(complete_actions(&f, 1, 9, &gens), Err(DmodError::InconsistentAlgebra { .. })));
    }

    #[test]
    fn non_commuting_generators_rejected() {
        let f = Field::prime(3).unwrap();
        let a = SeriesMatrix::constant(&Matrix::from_rows(&[vec![0, 1], vec![0, 0]]), 9);
        let b = SeriesMatrix::constant(&Matrix::from_rows(&[vec![0, 0], vec![1, 0]]), 9);
        assert_eq!(complete_actions(&f, 1, 9, &[a, b]).unwrap_err(), DmodError::NonCommutingGenerators);
    }

    #[test]
    fn monodromy_examples() {
        let f = Field::prime(3).unwrap();
        let mono = |d: i64| {
            let m = local_model(&f, ResidueClass::new(3, 2, d), 1, 18).unwrap();
            monodromy(&m).iter().map(|x| x.get(0, 0)).collect::<Vec<_>>()
        };
        assert_eq!(mono(3), vec![0, 2]);
        assert_eq!(mono(7), vec![2, 0]);
    }

    #[test]
    fn exponent_examples() {
        let f = Field::prime(3).unwrap();
        let lm = |d: i64| local_model(&f, ResidueClass::new(3, 2, d), 1, 18).unwrap();
        assert_eq!(exponent(&direct_sum(&[lm(3), lm(7)])).unwrap().entries, vec![3, 7]);
        assert_eq!(exponent(&direct_sum(&[lm(0), lm(0), lm(0)])).unwrap().entries, vec![0, 0, 0]);
    }

    #[test]
    fn level_reduction_of_local_model() {
        let f = Field::prime(3).unwrap();
        for d in 0..27 {
            let module = local_model(&f, ResidueClass::new(3, 3, d), 2, 54).unwrap();
            for a in 0..2 {
                let reduced = level_reduce(&module, a).unwrap();
                let direct = local_model(&f, ResidueClass::new(3, a + 1, d), a, 54).unwrap();
                assert_eq!(reduced.generators(), direct.generators());
                assert!(p_curvature(&reduced).is_zero());
            }
        }
    }

    #[test]
    fn filtration_of_trivial_model_is_monomial() {
        let f = Field::prime(3).unwrap();
        let module = local_model(&f, ResidueClass::new(3, 2, 0), 1, 27).unwrap();
        for a in 0..=2 {
            let basis = sol_filtration(&module, a).unwrap();
            let mons = basis.monomials().unwrap();
            let step = 3usize.pow(a);
            let expect: Vec<(usize, usize)> = (0..basis.window).filter(|l| l % step == 0).map(|l| (0, l)).collect();
            assert_eq!(mons, expect);
        }
    }

    #[test]
    fn rank_two_kernel_example() {
        let f = Field::prime(3).unwrap();
        let lm = |d: i64| local_model(&f, ResidueClass::new(3, 1, d), 0, 6).unwrap();
        let module = direct_sum(&[lm(0), lm(1)]);
        let (_, conn) = induced_connection(&module, 0).unwrap();
        assert_eq!(conn.rows, 6);
        let ker = induced_kernel(&module, 0).unwrap();
        // Constants: only the d = 0 summand contributes.
        let constants = ker.vectors.iter().filter(|v| v[0] != 0 || v[3] != 0).count();
        assert_eq!(constants, 1);
    }

    #[test]
    fn count_ra_examples() {
        let e = ExponentMultiset::new(3, 2, &[3, 7]);
        assert_eq!(count_ra(std::slice::from_ref(&e), 1), 0);
        // 7 - 3 = 4 has digits (1, 1).
        assert_eq!(count_ra(std::slice::from_ref(&e), 0), 0);
        let f = ExponentMultiset::new(3, 2, &[0, 5]);
        assert_eq!(count_ra(&[f], 0), 1);
        assert_eq!(count_ra(&[], 1), 0);
    }
}
