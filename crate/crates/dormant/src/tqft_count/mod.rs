//! Counting admissible edge labellings on trivalent graphs, graph independence,
//! gluing identities, level lifting of edge numberings, and closed-form
//! dimension formulas.

pub mod engine;

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{enumerate, validate, GraphError, TrivalentSemiGraph, DEFAULT_CAP};
use crate::oper_p1::AdmissibilityTable;
use crate::radii::{radius_from_edge_number, reduce_level, RadiiError, Radius};

pub use engine::{count_backtrack, count_contract, labellings, FusionTensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Radii(#[from] RadiiError),
    #[error("radius {0} is not in the table's index set")]
    TableMissing(u64),
    #[error("expected {expected} radii, got {got}")]
    WrongRadiiCount { expected: usize, got: usize },
    #[error("counts differ between graphs of the same type: {0:?}")]
    GraphDependence(Vec<u64>),
    #[error("gluing identity fails: {lhs} != {rhs}")]
    IdentityViolated { lhs: u64, rhs: u64 },
    #[error("lifted numbering is not admissible at the next level")]
    LiftNotAdmissible,
    #[error("unknown formula query {0:?}")]
    UnknownQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Backtrack,
    Contract,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountQuery {
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    pub g: u32,
    pub r: u32,
    pub radii: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCount {
    pub graph: TrivalentSemiGraph,
    pub count: u64,
}

/// A count together with the per-graph values that certify graph independence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub query: CountQuery,
    pub count: u64,
    pub graphs_checked: usize,
    pub certificate: Vec<GraphCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingReport {
    pub lhs: u64,
    pub rhs: u64,
    /// Summands indexed by the radius on the glued edge.
    pub terms: Vec<(u64, u64)>,
}

/// Counting against one admissibility table, with enumerated graphs memoized.
pub struct Counter {
    pub table: AdmissibilityTable,
    pub tensor: FusionTensor,
    pub cap: u32,
    graphs: Mutex<HashMap<(u32, u32), Arc<Vec<TrivalentSemiGraph>>>>,
}

impl Counter {
    pub fn new(table: AdmissibilityTable) -> Self {
        Self::with_cap(table, DEFAULT_CAP)
    }

    pub fn with_cap(table: AdmissibilityTable, cap: u32) -> Self {
        let tensor = FusionTensor::from_table(&table);
        Counter { table, tensor, cap, graphs: Mutex::new(HashMap::new()) }
    }

    pub fn graphs(&self, g: u32, r: u32) -> Result<Arc<Vec<TrivalentSemiGraph>>, CountError> {
        if let Some(v) = self.graphs.lock().unwrap().get(&(g, r)) {
            return Ok(v.clone());
        }
        let v = Arc::new(enumerate(g, r, self.cap)?);
        self.graphs.lock().unwrap().insert((g, r), v.clone());
        Ok(v)
    }

    fn indices(&self, radii: &[u64]) -> Result<Vec<usize>, CountError> {
        radii.iter().map(|&r| self.tensor.index_of(r).ok_or(CountError::TableMissing(r))).collect()
    }

    pub fn count_on_graph(&self, gr: &TrivalentSemiGraph, radii: &[u64], engine: Engine) -> Result<u64, CountError> {
        let ty = validate(gr)?;
        if radii.len() != ty.r as usize {
            return Err(CountError::WrongRadiiCount { expected: ty.r as usize, got: radii.len() });
        }
        let legs = self.indices(radii)?;
        Ok(match engine {
            Engine::Backtrack => count_backtrack(&self.tensor, gr, &legs),
            Engine::Contract => count_contract(&self.tensor, gr, &legs),
        })
    }

    /// Count on every graph of type (g, r); all values must agree.
    pub fn count(&self, g: u32, r: u32, radii: &[u64]) -> Result<CountResult, CountError> {
        if radii.len() != r as usize {
            return Err(CountError::WrongRadiiCount { expected: r as usize, got: radii.len() });
        }
        let graphs = self.graphs(g, r)?;
        let certificate: Vec<GraphCount> = graphs
            .iter()
            .map(|gr| Ok(GraphCount { graph: gr.clone(), count: self.count_on_graph(gr, radii, Engine::Contract)? }))
            .collect::<Result<_, CountError>>()?;
        let first = certificate[0].count;
        if certificate.iter().any(|c| c.count != first) {
            return Err(CountError::GraphDependence(certificate.iter().map(|c| c.count).collect()));
        }
        let query = CountQuery { p: self.table.p, level: self.table.level, g, r, radii: radii.to_vec() };
        Ok(CountResult { query, count: first, graphs_checked: certificate.len(), certificate })
    }

    /// Count on a single representative graph (no independence check).
    pub fn count_value(&self, g: u32, r: u32, radii: &[u64]) -> Result<u64, CountError> {
        let graphs = self.graphs(g, r)?;
        self.count_on_graph(&graphs[0], radii, Engine::Contract)
    }

    /// count(g1+g2, r1+r2; rho1, rho2) = sum over rho0 of
    /// count(g1, r1+1; rho1, rho0) count(g2, r2+1; rho2, rho0).
    pub fn verify_gluing_tree(&self, g1: u32, r1: u32, g2: u32, r2: u32, rho1: &[u64], rho2: &[u64]) -> Result<GluingReport, CountError> {
        let joined: Vec<u64> = rho1.iter().chain(rho2).copied().collect();
        let lhs = self.count_value(g1 + g2, r1 + r2, &joined)?;
        let mut terms = Vec::new();
        for &x in &self.tensor.labels {
            let mut a = rho1.to_vec();
            a.push(x);
            let mut b = rho2.to_vec();
            b.push(x);
            terms.push((x, self.count_value(g1, r1 + 1, &a)? * self.count_value(g2, r2 + 1, &b)?));
        }
        let rhs = terms.iter().map(|t| t.1).sum();
        if lhs != rhs {
            return Err(CountError::IdentityViolated { lhs, rhs });
        }
        Ok(GluingReport { lhs, rhs, terms })
    }

    /// count(g+1, r; rho) = sum over rho0 of count(g, r+2; rho, rho0, rho0).
    pub fn verify_gluing_loop(&self, g: u32, r: u32, rho: &[u64]) -> Result<GluingReport, CountError> {
        let lhs = self.count_value(g + 1, r, rho)?;
        let mut terms = Vec::new();
        for &x in &self.tensor.labels {
            let mut a = rho.to_vec();
            a.extend([x, x]);
            terms.push((x, self.count_value(g, r + 2, &a)?));
        }
        let rhs = terms.iter().map(|t| t.1).sum();
        if lhs != rhs {
            return Err(CountError::IdentityViolated { lhs, rhs });
        }
        Ok(GluingReport { lhs, rhs, terms })
    }

    /// All leg radii tuples with a positive count.
    pub fn nonempty_radii(&self, g: u32, r: u32) -> Result<Vec<Vec<u64>>, CountError> {
        let mut out = Vec::new();
        for rho in self.all_radii(r) {
            if self.count_value(g, r, &rho)? > 0 {
                out.push(rho);
            }
        }
        Ok(out)
    }

    /// Every r-tuple over the index set, lexicographic.
    pub fn all_radii(&self, r: u32) -> Vec<Vec<u64>> {
        let labels = &self.tensor.labels;
        let mut out = vec![Vec::new()];
        for _ in 0..r {
            out = out.into_iter().flat_map(|v| labels.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    }

    /// Admissible labellings of the internal edges of `gr` by radius representatives.
    pub fn admissible_labellings(&self, gr: &TrivalentSemiGraph, radii: &[u64]) -> Result<Vec<Vec<u64>>, CountError> {
        validate(gr)?;
        let legs = self.indices(radii)?;
        Ok(labellings(&self.tensor, gr, &legs).into_iter().map(|v| v.into_iter().map(|i| self.tensor.labels[i]).collect()).collect())
    }
}

/// Integer edge numbers on a graph; radii are (2a + 1)/2 at the given level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeNumbering {
    pub graph: TrivalentSemiGraph,
    pub p: u32,
    #[serde(rename = "N")]
    pub level: u32,
    /// One number per internal edge, in edge order.
    pub edges: Vec<u64>,
    /// One number per leg, by leg index.
    pub legs: Vec<u64>,
}

/// Smallest a >= 0 whose radius (2a + 1)/2 is `rho`.
pub fn edge_number_of(rho: &Radius) -> u64 {
    (0..rho.modulus())
        .find(|&a| radius_from_edge_number(a, rho.p, rho.level).is_ok_and(|r| r == *rho))
        .expect("every radius has an edge number")
}

impl EdgeNumbering {
    /// Numbering with the smallest edge number for each radius label.
    pub fn from_radii(graph: TrivalentSemiGraph, p: u32, level: u32, edges: &[u64], legs: &[u64]) -> Result<Self, CountError> {
        let num = |rep: &u64| Radius::from_rep(p, level, *rep).map(|r| edge_number_of(&r));
        Ok(EdgeNumbering {
            graph,
            p,
            level,
            edges: edges.iter().map(num).collect::<Result<_, _>>()?,
            legs: legs.iter().map(num).collect::<Result<_, _>>()?,
        })
    }

    pub fn edge_radii(&self) -> Result<Vec<u64>, CountError> {
        self.edges.iter().map(|&a| Ok(radius_from_edge_number(a, self.p, self.level)?.rep)).collect()
    }

    pub fn leg_radii(&self) -> Result<Vec<u64>, CountError> {
        self.legs.iter().map(|&a| Ok(radius_from_edge_number(a, self.p, self.level)?.rep)).collect()
    }

    /// Every vertex triple of labels lies in the table.
    pub fn is_admissible(&self, table: &AdmissibilityTable) -> Result<bool, CountError> {
        let (e, l) = (self.edge_radii()?, self.leg_radii()?);
        let mut at: Vec<Vec<u64>> = vec![Vec::new(); self.graph.vertices];
        for (i, ed) in self.graph.edges.iter().enumerate() {
            at[ed[0]].push(e[i]);
            at[ed[1]].push(e[i]);
        }
        for leg in &self.graph.legs {
            at[leg[0]].push(l[leg[1] - 1]);
        }
        Ok(at.iter().all(|t| t.len() == 3 && table.contains(t[0], t[1], t[2])))
    }
}

/// Reinterpret the same integers one level up and check admissibility there.
pub fn lift_numbering(num: &EdgeNumbering, upper: &AdmissibilityTable) -> Result<EdgeNumbering, CountError> {
    if upper.p != num.p || upper.level != num.level + 1 {
        return Err(RadiiError::LevelMismatch(upper.level, num.level + 1).into());
    }
    let lifted = EdgeNumbering { level: num.level + 1, ..num.clone() };
    if !lifted.is_admissible(upper)? {
        return Err(CountError::LiftNotAdmissible);
    }
    for (lo, hi) in num.leg_radii()?.iter().zip(lifted.leg_radii()?) {
        let back = reduce_level(&Radius::from_rep(num.p, num.level + 1, hi)?, num.level);
        debug_assert_eq!(back.rep, *lo);
    }
    Ok(lifted)
}

/// Closed-form dimension and rank functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaQuery {
    /// Relative dimension of the Hitchin-type base.
    HitchinBase,
    /// Same, with sections vanishing at the marked points.
    HitchinBaseCusp,
    /// Rank of the first de Rham cohomology of the adjoint flat module.
    DeRhamH1Rank,
    /// Rank of R^1 f_* of the adjoint horizontal sections.
    SolH1Rank,
    /// Rank of the pushforward of the cokernel of the adjoint connection.
    SolCokerRank,
    /// Dimension of the moduli of pointed curves.
    ModuliDim,
}

impl FormulaQuery {
    pub const ALL: [FormulaQuery; 6] = [
        FormulaQuery::HitchinBase,
        FormulaQuery::HitchinBaseCusp,
        FormulaQuery::DeRhamH1Rank,
        FormulaQuery::SolH1Rank,
        FormulaQuery::SolCokerRank,
        FormulaQuery::ModuliDim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FormulaQuery::HitchinBase => "hitchin-base",
            FormulaQuery::HitchinBaseCusp => "hitchin-base-cusp",
            FormulaQuery::DeRhamH1Rank => "de-rham-h1-rank",
            FormulaQuery::SolH1Rank => "sol-h1-rank",
            FormulaQuery::SolCokerRank => "sol-coker-rank",
            FormulaQuery::ModuliDim => "moduli-dim",
        }
    }
}

impl FromStr for FormulaQuery {
    type Err = CountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| CountError::UnknownQuery(s.to_string()))
    }
}

pub fn formulas(g: i64, r: i64, n: i64, q: FormulaQuery) -> i64 {
    let adj = n * n - 1;
    match q {
        FormulaQuery::HitchinBase | FormulaQuery::SolCokerRank => adj * (g - 1) + (n * n + n - 2) * r / 2,
        FormulaQuery::HitchinBaseCusp | FormulaQuery::SolH1Rank => adj * (g - 1) + n * (n - 1) * r / 2,
        FormulaQuery::DeRhamH1Rank => adj * (2 * g - 2 + r),
        FormulaQuery::ModuliDim => 3 * g - 3 + r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oper_p1::vertex_table;

    fn counter(p: u32, n: u32) -> Counter {
        Counter::new(vertex_table(p, n).unwrap())
    }

    #[test]
    fn single_vertex_and_tadpole() {
        let c = counter(5, 1);
        for rho in c.all_radii(3) {
            let v = c.count(0, 3, &rho).unwrap().count;
            assert_eq!(v, u64::from(c.table.contains(rho[0], rho[1], rho[2])));
        }
        for &x in &c.tensor.labels.clone() {
            let expect = c.tensor.labels.iter().filter(|&&t| c.table.contains(t, t, x)).count() as u64;
            assert_eq!(c.count(1, 1, &[x]).unwrap().count, expect);
        }
    }

    #[test]
    fn engines_agree() {
        for (p, n) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let c = counter(p, n);
            for (g, r) in [(2, 0), (1, 1), (0, 4), (1, 2), (0, 3)] {
                for gr in c.graphs(g, r).unwrap().iter() {
                    for rho in c.all_radii(r) {
                        let a = c.count_on_graph(gr, &rho, Engine::Backtrack).unwrap();
                        let b = c.count_on_graph(gr, &rho, Engine::Contract).unwrap();
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn genus_two_counts() {
        // (p^3 - p)/24 dormant opers on a general genus-2 curve.
        for p in [3u32, 5, 7] {
            let c = counter(p, 1);
            let res = c.count(2, 0, &[]).unwrap();
            assert_eq!(res.count, ((p.pow(3) - p) / 24) as u64);
            assert_eq!(res.graphs_checked, 2);
        }
    }

    #[test]
    fn wrong_inputs_error() {
        let c = counter(5, 1);
        assert!(matches!(c.count(1, 1, &[]), Err(CountError::WrongRadiiCount { .. })));
        assert_eq!(c.count(1, 1, &[3]), Err(CountError::TableMissing(3)));
    }

    #[test]
    fn gluing_small_cases() {
        let c = counter(5, 1);
        let r = c.verify_gluing_tree(1, 0, 1, 0, &[], &[]).unwrap();
        assert_eq!(r.lhs, c.count(2, 0, &[]).unwrap().count);
        for rho in c.all_radii(4) {
            c.verify_gluing_tree(0, 2, 0, 2, &rho[..2], &rho[2..]).unwrap();
        }
        for rho in c.all_radii(1) {
            c.verify_gluing_loop(0, 1, &rho).unwrap();
        }
        c.verify_gluing_loop(1, 0, &[]).unwrap();
    }

    #[test]
    fn support_is_symmetric() {
        let c = counter(5, 1);
        let s = c.nonempty_radii(0, 4).unwrap();
        for rho in &s {
            let mut rev = rho.clone();
            rev.reverse();
            assert!(s.contains(&rev));
        }
    }

    #[test]
    fn level_one_numberings_lift() {
        let lower = vertex_table(3, 1).unwrap();
        let upper = vertex_table(3, 2).unwrap();
        let c = Counter::new(lower.clone());
        let mut lifted = 0;
        for (g, r) in [(0, 3), (1, 1), (2, 0), (0, 4), (1, 2)] {
            for gr in c.graphs(g, r).unwrap().iter() {
                for rho in c.all_radii(r) {
                    for lab in c.admissible_labellings(gr, &rho).unwrap() {
                        let num = EdgeNumbering::from_radii(gr.clone(), 3, 1, &lab, &rho).unwrap();
                        assert!(num.is_admissible(&lower).unwrap());
                        let up = lift_numbering(&num, &upper).unwrap();
                        assert_eq!(up.edges, num.edges);
                        for (lo, hi) in num.leg_radii().unwrap().iter().zip(up.leg_radii().unwrap()) {
                            assert_eq!(reduce_level(&Radius::from_rep(3, 2, hi).unwrap(), 1).rep, *lo);
                        }
                        lifted += 1;
                    }
                }
            }
        }
        assert!(lifted > 0);
    }

    #[test]
    fn edge_number_examples() {
        assert_eq!(edge_number_of(&Radius::from_rep(5, 1, 2).unwrap()), 0);
        assert_eq!(edge_number_of(&Radius::from_rep(5, 1, 1).unwrap()), 1);
        assert_eq!(edge_number_of(&Radius::from_rep(3, 2, 4).unwrap()), 0);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(formulas(2, 0, 2, FormulaQuery::HitchinBase), 3);
        assert_eq!(formulas(0, 3, 2, FormulaQuery::HitchinBaseCusp), 0);
        assert_eq!(formulas(2, 0, 2, FormulaQuery::SolH1Rank), 3);
        assert_eq!(formulas(2, 0, 2, FormulaQuery::ModuliDim), 3);
        assert_eq!("moduli-dim".parse::<FormulaQuery>(), Ok(FormulaQuery::ModuliDim));
        assert!(matches!("nope".parse::<FormulaQuery>(), Err(CountError::UnknownQuery(_))));
    }
}
