//! Connected trivalent semi-graphs of type (g, r): validation, canonical forms,
//! brute-force enumeration and the two gluing operations.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on 3g - 3 + r for enumeration.
pub const DEFAULT_CAP: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} has {incidences} incidences, expected 3")]
    NotTrivalent { vertex: usize, incidences: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("edge or leg endpoint {0} is out of range")]
    BadEndpoint(usize),
    #[error("leg indices must be exactly 1..=r")]
    BadLegIndices,
    #[error("3g - 3 + r = {dim} exceeds the cap {cap}")]
    CapExceeded { dim: u32, cap: u32 },
    #[error("no trivalent graph of type ({g}, {r}): need 2g - 2 + r > 0")]
    Unstable { g: u32, r: u32 },
    #[error("gluing needs at least {0} legs")]
    TooFewLegs(usize),
    #[error("json: {0}")]
    Json(String),
}

/// Vertices 0..n, internal edges as vertex pairs (loops allowed), legs as
/// (vertex, index) with indices 1..=r.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrivalentSemiGraph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub legs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphType {
    pub g: u32,
    pub r: u32,
}

impl TrivalentSemiGraph {
    /// One vertex with three legs.
    pub fn tripod() -> Self {
        TrivalentSemiGraph { vertices: 1, edges: vec![], legs: vec![[0, 1], [0, 2], [0, 3]] }
    }

    /// One vertex carrying a loop and a leg.
    pub fn tadpole() -> Self {
        TrivalentSemiGraph { vertices: 1, edges: vec![[0, 0]], legs: vec![[0, 1]] }
    }

    /// Two vertices joined by three edges.
    pub fn theta() -> Self {
        TrivalentSemiGraph { vertices: 2, edges: vec![[0, 1], [0, 1], [0, 1]], legs: vec![] }
    }

    /// Two loops joined by a bridge.
    pub fn dumbbell() -> Self {
        TrivalentSemiGraph { vertices: 2, edges: vec![[0, 0], [0, 1], [1, 1]], legs: vec![] }
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    /// Vertex carrying leg `index`.
    pub fn leg_vertex(&self, index: usize) -> Option<usize> {
        self.legs.iter().find(|l| l[1] == index).map(|l| l[0])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))
    }
}

/// Check trivalence and connectivity; return the type (first Betti number, legs).
pub fn validate(gr: &TrivalentSemiGraph) -> Result<GraphType, GraphError> {
    let n = gr.vertices;
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut deg = vec![0usize; n];
    for e in &gr.edges {
        for &v in e {
            if v >= n {
                return Err(GraphError::BadEndpoint(v));
            }
            deg[v] += 1;
        }
    }
    let mut idx: Vec<usize> = Vec::new();
    for l in &gr.legs {
        if l[0] >= n {
            return Err(GraphError::BadEndpoint(l[0]));
        }
        deg[l[0]] += 1;
        idx.push(l[1]);
    }
    idx.sort();
    if idx.iter().enumerate().any(|(i, &x)| x != i + 1) {
        return Err(GraphError::BadLegIndices);
    }
    if let Some((vertex, &incidences)) = deg.iter().enumerate().find(|(_, &d)| d != 3) {
        return Err(GraphError::NotTrivalent { vertex, incidences });
    }
    if !is_connected(n, &gr.edges) {
        return Err(GraphError::Disconnected);
    }
    let g = gr.edges.len() + 1 - n;
    Ok(GraphType { g: g as u32, r: gr.legs.len() as u32 })
}

fn is_connected(n: usize, edges: &[[usize; 2]]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in edges {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|v| find(&mut parent, v) == root)
}

fn relabel(gr: &TrivalentSemiGraph, perm: &[usize]) -> TrivalentSemiGraph {
    let mut edges: Vec<[usize; 2]> = gr
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (perm[e[0]], perm[e[1]]);
            [a.min(b), a.max(b)]
        })
        .collect();
    edges.sort();
    let mut legs: Vec<[usize; 2]> = gr.legs.iter().map(|l| [perm[l[0]], l[1]]).collect();
    legs.sort_by_key(|l| l[1]);
    TrivalentSemiGraph { vertices: gr.vertices, edges, legs }
}

/// Relabeling-invariant data of a vertex used to restrict the permutation search.
fn vertex_invariant(gr: &TrivalentSemiGraph, v: usize) -> (Vec<usize>, usize, Vec<usize>) {
    let mut legs: Vec<usize> = gr.legs.iter().filter(|l| l[0] == v).map(|l| l[1]).collect();
    legs.sort();
    let loops = gr.edges.iter().filter(|e| e[0] == v && e[1] == v).count();
    let mut mult: Vec<usize> = (0..gr.vertices)
        .filter(|&w| w != v)
        .map(|w| gr.edges.iter().filter(|e| (e[0] == v && e[1] == w) || (e[0] == w && e[1] == v)).count())
        .filter(|&m| m > 0)
        .collect();
    mult.sort();
    (legs, loops, mult)
}

/// Lexicographically least relabeling among those ordering vertices by invariant.
pub fn canonical_form(gr: &TrivalentSemiGraph) -> TrivalentSemiGraph {
    let n = gr.vertices;
    let mut order: Vec<(_, usize)> = (0..n).map(|v| (vertex_invariant(gr, v), v)).collect();
    order.sort();
    // Classes of equal invariant occupy consecutive target slots.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, (inv, v)) in order.iter().enumerate() {
        if i > 0 && order[i - 1].0 == *inv {
            classes.last_mut().unwrap().push(*v);
        } else {
            classes.push(vec![*v]);
        }
    }
    let mut best: Option<TrivalentSemiGraph> = None;
    let mut perm = vec![0usize; n];
    search_perms(gr, &classes, 0, 0, &mut perm, &mut best);
    best.expect("at least one labeling")
}

fn search_perms(
    gr: &TrivalentSemiGraph,
    classes: &[Vec<usize>],
    ci: usize,
    slot: usize,
    perm: &mut Vec<usize>,
    best: &mut Option<TrivalentSemiGraph>,
) {
    if ci == classes.len() {
        let cand = relabel(gr, perm);
        if best.as_ref().is_none_or(|b| cand < *b) {
            *best = Some(cand);
        }
        return;
    }
    let mut members = classes[ci].clone();
    permute_class(&mut members, 0, &mut |arr| {
        for (k, &v) in arr.iter().enumerate() {
            perm[v] = slot + k;
        }
        search_perms(gr, classes, ci + 1, slot + arr.len(), perm, best);
    });
}

fn permute_class(arr: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == arr.len() {
        visit(arr);
        return;
    }
    for i in k..arr.len() {
        arr.swap(k, i);
        permute_class(arr, k + 1, visit);
        arr.swap(k, i);
    }
}

pub fn is_isomorphic(a: &TrivalentSemiGraph, b: &TrivalentSemiGraph) -> bool {
    a.vertices == b.vertices && canonical_form(a) == canonical_form(b)
}

/// All isomorphism classes of type (g, r), legs distinguishable, as canonical forms.
pub fn enumerate(g: u32, r: u32, cap: u32) -> Result<Vec<TrivalentSemiGraph>, GraphError> {
    if 2 * g + r <= 2 {
        return Err(GraphError::Unstable { g, r });
    }
    let dim = 3 * g + r - 3;
    if dim > cap {
        return Err(GraphError::CapExceeded { dim, cap });
    }
    let n = (2 * g + r - 2) as usize;
    let r = r as usize;
    let mut shapes: BTreeSet<(Vec<usize>, Vec<[usize; 2]>)> = BTreeSet::new();
    let mut counts = vec![0usize; n];
    leg_counts(n, r, 3, 0, &mut counts, &mut |lc| {
        let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, 3 - lc[v])).collect();
        let mut seen = HashSet::new();
        matchings(&stubs, &mut Vec::new(), &mut |edges| {
            let mut e = edges.to_vec();
            e.sort();
            if seen.insert(e.clone()) && is_connected(n, &e) {
                shapes.insert((lc.to_vec(), e));
            }
        });
    });
    let mut classes = BTreeSet::new();
    for (lc, edges) in shapes {
        let mut legs = Vec::with_capacity(r);
        assign_legs(&lc, 1, r, &mut vec![0; n], &mut legs, &mut |legs| {
            let gr = TrivalentSemiGraph { vertices: n, edges: edges.clone(), legs: legs.to_vec() };
            classes.insert(canonical_form(&gr));
        });
    }
    Ok(classes.into_iter().collect())
}

/// Non-increasing leg counts per vertex summing to r.
fn leg_counts(n: usize, left: usize, max: usize, v: usize, out: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if v == n {
        if left == 0 {
            visit(out);
        }
        return;
    }
    for c in (0..=max.min(left)).rev() {
        out[v] = c;
        leg_counts(n, left - c, c, v + 1, out, visit);
    }
}

/// Pair up stubs (vertex labels) into edges; partners with equal labels are tried once.
fn matchings(stubs: &[usize], acc: &mut Vec<[usize; 2]>, visit: &mut dyn FnMut(&[[usize; 2]])) {
    if stubs.is_empty() {
        visit(acc);
        return;
    }
    let first = stubs[0];
    let mut tried = Vec::new();
    for i in 1..stubs.len() {
        if tried.contains(&stubs[i]) {
            continue;
        }
        tried.push(stubs[i]);
        let rest: Vec<usize> = stubs[1..].iter().enumerate().filter(|&(j, _)| j + 1 != i).map(|(_, &s)| s).collect();
        acc.push([first.min(stubs[i]), first.max(stubs[i])]);
        matchings(&rest, acc, visit);
        acc.pop();
    }
}

fn assign_legs(
    cap: &[usize],
    label: usize,
    r: usize,
    used: &mut Vec<usize>,
    legs: &mut Vec<[usize; 2]>,
    visit: &mut dyn FnMut(&[[usize; 2]]),
) {
    if label > r {
        visit(legs);
        return;
    }
    for v in 0..cap.len() {
        if used[v] < cap[v] {
            used[v] += 1;
            legs.push([v, label]);
            assign_legs(cap, label + 1, r, used, legs, visit);
            legs.pop();
            used[v] -= 1;
        }
    }
}

/// Join the last leg of `a` to the last leg of `b`.
///
/// Legs of `a` keep their indices 1..r1; legs of `b` follow as r1+1..r1+r2.
pub fn glue_tree(a: &TrivalentSemiGraph, b: &TrivalentSemiGraph) -> Result<TrivalentSemiGraph, GraphError> {
    let (ra, rb) = (a.num_legs(), b.num_legs());
    if ra == 0 || rb == 0 {
        return Err(GraphError::TooFewLegs(1));
    }
    let off = a.vertices;
    let va = a.leg_vertex(ra).ok_or(GraphError::BadLegIndices)?;
    let vb = b.leg_vertex(rb).ok_or(GraphError::BadLegIndices)? + off;
    let mut edges = a.edges.clone();
    edges.extend(b.edges.iter().map(|e| [e[0] + off, e[1] + off]));
    edges.push([va, vb]);
    let mut legs: Vec<[usize; 2]> = a.legs.iter().filter(|l| l[1] != ra).copied().collect();
    legs.extend(b.legs.iter().filter(|l| l[1] != rb).map(|l| [l[0] + off, l[1] + ra - 1]));
    legs.sort_by_key(|l| l[1]);
    Ok(TrivalentSemiGraph { vertices: a.vertices + b.vertices, edges, legs })
}

/// Fuse the last two legs into an internal edge.
pub fn glue_loop(gr: &TrivalentSemiGraph) -> Result<TrivalentSemiGraph, GraphError> {
    let r = gr.num_legs();
    if r < 2 {
        return Err(GraphError::TooFewLegs(2));
    }
    let va = gr.leg_vertex(r - 1).ok_or(GraphError::BadLegIndices)?;
    let vb = gr.leg_vertex(r).ok_or(GraphError::BadLegIndices)?;
    let mut edges = gr.edges.clone();
    edges.push([va.min(vb), va.max(vb)]);
    let legs = gr.legs.iter().filter(|l| l[1] < r - 1).copied().collect();
    Ok(TrivalentSemiGraph { vertices: gr.vertices, edges, legs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&TrivalentSemiGraph::theta()), Ok(GraphType { g: 2, r: 0 }));
        assert_eq!(validate(&TrivalentSemiGraph::dumbbell()), Ok(GraphType { g: 2, r: 0 }));
        assert_eq!(validate(&TrivalentSemiGraph::tadpole()), Ok(GraphType { g: 1, r: 1 }));
        let bad = TrivalentSemiGraph { vertices: 1, edges: vec![], legs: vec![[0, 1], [0, 2]] };
        assert!(matches!(validate(&bad), Err(GraphError::NotTrivalent { .. })));
        let two = TrivalentSemiGraph { vertices: 2, edges: vec![], legs: (1..=6).map(|i| [(i - 1) / 3, i]).collect() };
        assert_eq!(validate(&two), Err(GraphError::Disconnected));
    }

    #[test]
    fn enumerate_examples() {
        let g20 = enumerate(2, 0, DEFAULT_CAP).unwrap();
        assert_eq!(g20.len(), 2);
        assert!(g20.contains(&canonical_form(&TrivalentSemiGraph::theta())));
        assert!(g20.contains(&canonical_form(&TrivalentSemiGraph::dumbbell())));
        assert_eq!(enumerate(0, 3, DEFAULT_CAP).unwrap(), vec![canonical_form(&TrivalentSemiGraph::tripod())]);
        assert_eq!(enumerate(1, 1, DEFAULT_CAP).unwrap(), vec![canonical_form(&TrivalentSemiGraph::tadpole())]);
        assert!(matches!(enumerate(4, 0, DEFAULT_CAP), Err(GraphError::CapExceeded { .. })));
        assert!(matches!(enumerate(0, 2, DEFAULT_CAP), Err(GraphError::Unstable { .. })));
    }

    #[test]
    fn enumerate_counts_match_known_values() {
        // (0, r): (2r - 5)!! labeled cubic trees.
        assert_eq!(enumerate(0, 4, DEFAULT_CAP).unwrap().len(), 3);
        assert_eq!(enumerate(0, 5, DEFAULT_CAP).unwrap().len(), 15);
        assert_eq!(enumerate(0, 6, DEFAULT_CAP).unwrap().len(), 105);
        // (1, 2): a 2-cycle with one leg at each vertex, or a tadpole hanging from a
        // vertex carrying both legs.
        assert_eq!(enumerate(1, 2, DEFAULT_CAP).unwrap().len(), 2);
        // (3, 0): five connected cubic multigraphs on four vertices.
        assert_eq!(enumerate(3, 0, DEFAULT_CAP).unwrap().len(), 5);
        for (g, r) in [(1, 2), (0, 5), (2, 1), (1, 3)] {
            for gr in enumerate(g, r, DEFAULT_CAP).unwrap() {
                assert_eq!(validate(&gr), Ok(GraphType { g, r }));
            }
        }
    }

    #[test]
    fn canonical_form_ignores_vertex_labels() {
        let a = TrivalentSemiGraph { vertices: 2, edges: vec![[0, 1]], legs: vec![[0, 1], [0, 2], [1, 3], [1, 4]] };
        let b = TrivalentSemiGraph { vertices: 2, edges: vec![[1, 0]], legs: vec![[1, 1], [1, 2], [0, 3], [0, 4]] };
        assert!(is_isomorphic(&a, &b));
        let c = TrivalentSemiGraph { vertices: 2, edges: vec![[0, 1]], legs: vec![[0, 1], [0, 3], [1, 2], [1, 4]] };
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn gluing_examples() {
        let t = TrivalentSemiGraph::tripod();
        let four = glue_tree(&t, &t).unwrap();
        assert_eq!(validate(&four), Ok(GraphType { g: 0, r: 4 }));
        let tad = TrivalentSemiGraph::tadpole();
        let d = glue_tree(&tad, &tad).unwrap();
        assert!(is_isomorphic(&d, &TrivalentSemiGraph::dumbbell()));
        assert!(is_isomorphic(&glue_loop(&t).unwrap(), &tad));
        let one_two = glue_loop(&four).unwrap();
        assert_eq!(validate(&one_two), Ok(GraphType { g: 1, r: 2 }));
        let closed = glue_loop(&one_two).unwrap();
        assert!(is_isomorphic(&closed, &TrivalentSemiGraph::theta()) || is_isomorphic(&closed, &TrivalentSemiGraph::dumbbell()));
    }

    #[test]
    fn gluing_types_add_up() {
        let mut small = Vec::new();
        for (g, r) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)] {
            small.extend(enumerate(g, r, DEFAULT_CAP).unwrap().into_iter().map(|x| (g, r, x)));
        }
        for (g1, r1, a) in &small {
            for (g2, r2, b) in &small {
                let glued = glue_tree(a, b).unwrap();
                assert_eq!(validate(&glued), Ok(GraphType { g: g1 + g2, r: r1 + r2 - 2 }));
            }
            if *r1 >= 2 {
                assert_eq!(validate(&glue_loop(a).unwrap()), Ok(GraphType { g: g1 + 1, r: r1 - 2 }));
            }
        }
    }

    #[test]
    fn json_roundtrip_is_exact() {
        for gr in enumerate(1, 2, DEFAULT_CAP).unwrap() {
            let s = gr.to_json();
            let back = TrivalentSemiGraph::from_json(&s).unwrap();
            assert_eq!(back, gr);
            assert_eq!(back.to_json(), s);
        }
        let s = r#"{"vertices":1,"edges":[[0,0]],"legs":[[0,1]]}"#;
        assert_eq!(TrivalentSemiGraph::from_json(s).unwrap().to_json(), s);
    }

    #[test]
    fn enumeration_is_stable() {
        assert_eq!(enumerate(1, 3, DEFAULT_CAP).unwrap(), enumerate(1, 3, DEFAULT_CAP).unwrap());
    }
}
