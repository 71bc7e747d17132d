//! Two independent evaluators of the labelling sum on a trivalent graph:
//! backtracking over internal edges, and greedy variable elimination.

use rayon::prelude::*;

use crate::graphs::TrivalentSemiGraph;
use crate::oper_p1::AdmissibilityTable;

/// 0/1 symmetric three-tensor of admissible index triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionTensor {
    /// Radius representatives, ascending; position = tensor index.
    pub labels: Vec<u64>,
    data: Vec<bool>,
}

impl FusionTensor {
    pub fn from_table(table: &AdmissibilityTable) -> Self {
        let labels = table.index_set();
        let n = labels.len();
        let mut data = vec![false; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data[(i * n + j) * n + k] = table.contains(labels[i], labels[j], labels[k]);
                }
            }
        }
        FusionTensor { labels, data }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        let n = self.len();
        self.data[(i * n + j) * n + k]
    }

    pub fn index_of(&self, rep: u64) -> Option<usize> {
        self.labels.binary_search(&rep).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fixed(usize),
    Edge(usize),
}

fn vertex_slots(gr: &TrivalentSemiGraph, legs: &[usize]) -> Vec<Vec<Slot>> {
    let mut slots = vec![Vec::with_capacity(3); gr.vertices];
    for (e, ed) in gr.edges.iter().enumerate() {
        slots[ed[0]].push(Slot::Edge(e));
        slots[ed[1]].push(Slot::Edge(e));
    }
    for l in &gr.legs {
        slots[l[0]].push(Slot::Fixed(legs[l[1] - 1]));
    }
    slots
}

fn value(slot: Slot, assign: &[usize]) -> usize {
    match slot {
        Slot::Fixed(x) => x,
        Slot::Edge(e) => assign[e],
    }
}

/// Backtracking count; `legs[i]` is the tensor index on leg i + 1.
pub fn count_backtrack(t: &FusionTensor, gr: &TrivalentSemiGraph, legs: &[usize]) -> u64 {
    let slots = vertex_slots(gr, legs);
    let n_edges = gr.edges.len();
    // Vertex v is checked once its last edge (in edge order) is assigned.
    let mut check_after: Vec<Vec<usize>> = vec![Vec::new(); n_edges];
    let mut immediate = Vec::new();
    for (v, s) in slots.iter().enumerate() {
        match s.iter().filter_map(|x| if let Slot::Edge(e) = x { Some(*e) } else { None }).max() {
            Some(e) => check_after[e].push(v),
            None => immediate.push(v),
        }
    }
    let ok = |v: usize, assign: &[usize]| {
        let s = &slots[v];
        t.get(value(s[0], assign), value(s[1], assign), value(s[2], assign))
    };
    if !immediate.iter().all(|&v| ok(v, &[])) {
        return 0;
    }
    if n_edges == 0 {
        return 1;
    }
    fn rec(e: usize, assign: &mut Vec<usize>, t: &FusionTensor, check_after: &[Vec<usize>], ok: &dyn Fn(usize, &[usize]) -> bool) -> u64 {
        if e == assign.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..t.len() {
            assign[e] = x;
            if check_after[e].iter().all(|&v| ok(v, assign)) {
                total += rec(e + 1, assign, t, check_after, ok);
            }
        }
        total
    }
    (0..t.len())
        .into_par_iter()
        .map(|x| {
            let mut assign = vec![0; n_edges];
            assign[0] = x;
            if check_after[0].iter().all(|&v| ok(v, &assign)) {
                rec(1, &mut assign, t, &check_after, &ok)
            } else {
                0
            }
        })
        .sum()
}

/// A dense factor over a sorted list of edge variables.
#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    vals: Vec<u64>,
}

impl Factor {
    fn at(&self, n: usize, assign: &[usize]) -> u64 {
        let idx = self.vars.iter().fold(0, |acc, &v| acc * n + assign[v]);
        self.vals[idx]
    }
}

/// Enumerate all assignments of `vars` (row-major), writing into `assign`.
fn for_each_assignment(n: usize, vars: &[usize], assign: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    let total = n.pow(vars.len() as u32);
    for code in 0..total {
        let mut c = code;
        for &v in vars.iter().rev() {
            assign[v] = c % n;
            c /= n;
        }
        visit(assign);
    }
}

/// Count by eliminating edge variables, each time choosing the one whose
/// elimination creates the smallest intermediate factor.
pub fn count_contract(t: &FusionTensor, gr: &TrivalentSemiGraph, legs: &[usize]) -> u64 {
    let n = t.len();
    let slots = vertex_slots(gr, legs);
    let n_edges = gr.edges.len();
    let mut assign = vec![0usize; n_edges];
    let mut factors: Vec<Factor> = slots
        .iter()
        .map(|s| {
            let mut vars: Vec<usize> = s.iter().filter_map(|x| if let Slot::Edge(e) = x { Some(*e) } else { None }).collect();
            vars.sort();
            vars.dedup();
            let mut vals = Vec::with_capacity(n.pow(vars.len() as u32));
            for_each_assignment(n, &vars, &mut assign, &mut |a| {
                vals.push(u64::from(t.get(value(s[0], a), value(s[1], a), value(s[2], a))));
            });
            Factor { vars, vals }
        })
        .collect();
    let mut remaining: Vec<usize> = (0..n_edges).collect();
    while !remaining.is_empty() {
        let scope = |e: usize, fs: &[Factor]| {
            let mut u: Vec<usize> = fs.iter().filter(|f| f.vars.contains(&e)).flat_map(|f| f.vars.iter().copied()).filter(|&v| v != e).collect();
            u.sort();
            u.dedup();
            u
        };
        let (pos, &e) = remaining
            .iter()
            .enumerate()
            .min_by_key(|&(_, &e)| (scope(e, &factors).len(), e))
            .expect("nonempty");
        remaining.remove(pos);
        let out_vars = scope(e, &factors);
        let (involved, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&e));
        let mut vals = Vec::with_capacity(n.pow(out_vars.len() as u32));
        let mut scratch = assign.clone();
        let total = n.pow(out_vars.len() as u32);
        for code in 0..total {
            let mut c = code;
            for &v in out_vars.iter().rev() {
                scratch[v] = c % n;
                c /= n;
            }
            let mut s = 0u64;
            for x in 0..n {
                scratch[e] = x;
                s += involved.iter().map(|f| f.at(n, &scratch)).product::<u64>();
            }
            vals.push(s);
        }
        factors = rest;
        factors.push(Factor { vars: out_vars, vals });
    }
    factors.iter().map(|f| f.vals[0]).product()
}

/// All admissible labellings of the internal edges, as tensor indices.
pub fn labellings(t: &FusionTensor, gr: &TrivalentSemiGraph, legs: &[usize]) -> Vec<Vec<usize>> {
    let slots = vertex_slots(gr, legs);
    let n_edges = gr.edges.len();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n_edges];
    let all: Vec<usize> = (0..n_edges).collect();
    for_each_assignment(t.len(), &all, &mut assign, &mut |a| {
        if slots.iter().all(|s| t.get(value(s[0], a), value(s[1], a), value(s[2], a))) {
            out.push(a.to_vec());
        }
    });
    out
}
