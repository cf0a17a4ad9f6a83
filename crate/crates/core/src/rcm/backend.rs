//! Betti-delta oracles for single-plaquette updates.
//!
//! `kills_cycle(cell)` answers whether the presence of `cell` lowers
//! `betti_{i-1}` by one, given the current state of every other plaquette.

use alloc::vec;
use alloc::vec::Vec;

use crate::cubical::{Complex, Geometry};
use crate::field::PrimeField;
use crate::graph::{Adjacency, Search};
use crate::linalg::{IncrementalSpan, SparseVec};

pub trait Backend {
    fn open_mask(&self) -> &[bool];
    fn set_open(&mut self, cell: usize, open: bool);
    fn kills_cycle(&mut self, cell: usize) -> bool;

    fn is_open(&self, cell: usize) -> bool {
        self.open_mask()[cell]
    }
}

/// Generic backend: incremental span of plaquette boundaries over F_q.
#[derive(Clone, Debug)]
pub struct LinearBackend {
    open: Vec<bool>,
    boundaries: Vec<SparseVec>,
    span: IncrementalSpan,
    updates: usize,
    rebuild_every: usize,
}

impl LinearBackend {
    pub fn new(complex: &Complex, i: usize, field: PrimeField, open: &[bool]) -> Self {
        let n = complex.num_cells(i);
        let boundaries: Vec<SparseVec> = (0..n)
            .map(|c| {
                let mut v: SparseVec =
                    complex.faces(i, c).iter().map(|&(f, s)| (f as usize, field.from_i64(s as i64))).collect();
                v.sort_unstable_by_key(|e| e.0);
                v
            })
            .collect();
        let span = IncrementalSpan::new(field, complex.num_cells(i - 1), n);
        let mut b = LinearBackend { open: open.to_vec(), boundaries, span, updates: 0, rebuild_every: n.max(1) };
        b.rebuild();
        b
    }

    fn rebuild(&mut self) {
        self.span.clear();
        for c in 0..self.open.len() {
            if self.open[c] {
                self.span.insert(c, &self.boundaries[c]);
            }
        }
        self.updates = 0;
    }

    /// Rank of the span of open boundaries.
    pub fn rank(&self) -> usize {
        self.span.rank()
    }
}

impl Backend for LinearBackend {
    fn open_mask(&self) -> &[bool] {
        &self.open
    }

    fn set_open(&mut self, cell: usize, open: bool) {
        if self.open[cell] == open {
            return;
        }
        self.open[cell] = open;
        if open {
            self.span.insert(cell, &self.boundaries[cell]);
        } else {
            self.span.remove(cell);
        }
        self.updates += 1;
        if self.updates >= self.rebuild_every {
            self.rebuild();
        }
    }

    fn kills_cycle(&mut self, cell: usize) -> bool {
        if self.open[cell] {
            !self.span.is_redundant(cell)
        } else {
            !self.span.contains(&self.boundaries[cell])
        }
    }
}

#[derive(Clone, Debug)]
struct EdgeGraph {
    ends: Vec<(u32, u32)>,
    incidence_start: Vec<usize>,
    incidence: Vec<u32>,
    present: Vec<bool>,
}

impl Adjacency for EdgeGraph {
    fn for_each_neighbor(&self, node: usize, excluded: usize, f: &mut dyn FnMut(usize)) {
        for &e in &self.incidence[self.incidence_start[node]..self.incidence_start[node + 1]] {
            let e = e as usize;
            if e != excluded && self.present[e] {
                let (a, b) = self.ends[e];
                f(if a as usize == node { b as usize } else { a as usize });
            }
        }
    }
}

impl EdgeGraph {
    fn new(nodes: usize, ends: Vec<(u32, u32)>, present: Vec<bool>) -> Self {
        let mut start = vec![0usize; nodes + 1];
        for &(a, b) in &ends {
            start[a as usize + 1] += 1;
            if b != a {
                start[b as usize + 1] += 1;
            }
        }
        for k in 0..nodes {
            start[k + 1] += start[k];
        }
        let mut fill = start.clone();
        let mut inc = vec![0u32; start[nodes]];
        for (e, &(a, b)) in ends.iter().enumerate() {
            inc[fill[a as usize]] = e as u32;
            fill[a as usize] += 1;
            if b != a {
                inc[fill[b as usize]] = e as u32;
                fill[b as usize] += 1;
            }
        }
        EdgeGraph { ends, incidence_start: start, incidence: inc, present }
    }
}

/// Fast path for `i = 1`: an edge kills a component iff its endpoints are
/// otherwise disconnected.
#[derive(Clone, Debug)]
pub struct GraphBackend {
    open: Vec<bool>,
    graph: EdgeGraph,
    search: Search,
}

impl GraphBackend {
    pub fn new(complex: &Complex, open: &[bool]) -> Self {
        let n = complex.num_cells(1);
        let ends = (0..n)
            .map(|e| {
                let f = complex.faces(1, e);
                (f[0].0, f[1].0)
            })
            .collect();
        let nv = complex.num_cells(0);
        GraphBackend { open: open.to_vec(), graph: EdgeGraph::new(nv, ends, open.to_vec()), search: Search::new(nv) }
    }
}

impl Backend for GraphBackend {
    fn open_mask(&self) -> &[bool] {
        &self.open
    }

    fn set_open(&mut self, cell: usize, open: bool) {
        self.open[cell] = open;
        self.graph.present[cell] = open;
    }

    fn kills_cycle(&mut self, cell: usize) -> bool {
        let (a, b) = self.graph.ends[cell];
        !self.search.connected(&self.graph, a as usize, b as usize, cell)
    }
}

/// Fast path for `i = d - 1` on a box: the graph on d-cells plus one exterior
/// node whose edges are the closed plaquettes. Opening a plaquette kills an
/// `(i-1)`-cycle iff its dual edge is not a bridge.
#[derive(Clone, Debug)]
pub struct DualGraphBackend {
    open: Vec<bool>,
    graph: EdgeGraph,
    search: Search,
    signs: Vec<i8>,
}

impl DualGraphBackend {
    pub fn new(complex: &Complex, open: &[bool]) -> Option<Self> {
        let d = complex.d();
        if !matches!(complex.geometry(), Geometry::Box { .. }) || complex.max_dim() < d || d < 2 {
            return None;
        }
        let i = d - 1;
        let ext = complex.num_cells(d) as u32;
        let mut ends = Vec::with_capacity(complex.num_cells(i));
        let mut signs = Vec::with_capacity(complex.num_cells(i));
        for s in 0..complex.num_cells(i) {
            let cof = complex.cofaces(i, s);
            let (u, su) = cof[0];
            let v = if cof.len() > 1 { cof[1].0 } else { ext };
            ends.push((u, v));
            signs.push(su);
        }
        let present = open.iter().map(|&o| !o).collect();
        let graph = EdgeGraph::new(ext as usize + 1, ends, present);
        Some(DualGraphBackend { open: open.to_vec(), graph, search: Search::new(ext as usize + 1), signs })
    }

    /// The two dual nodes of a plaquette and the sign of the plaquette in the
    /// boundary of the first one.
    pub fn dual_edge(&self, cell: usize) -> (usize, usize, i8) {
        let (a, b) = self.graph.ends[cell];
        (a as usize, b as usize, self.signs[cell])
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.incidence_start.len() - 1
    }
}

impl Backend for DualGraphBackend {
    fn open_mask(&self) -> &[bool] {
        &self.open
    }

    fn set_open(&mut self, cell: usize, open: bool) {
        self.open[cell] = open;
        self.graph.present[cell] = !open;
    }

    fn kills_cycle(&mut self, cell: usize) -> bool {
        let (a, b) = self.graph.ends[cell];
        self.search.connected(&self.graph, a as usize, b as usize, cell)
    }
}

/// Picks the fastest applicable backend.
#[derive(Clone, Debug)]
pub enum AnyBackend {
    Linear(LinearBackend),
    Graph(GraphBackend),
    Dual(DualGraphBackend),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Auto,
    Linear,
}

impl AnyBackend {
    pub fn new(complex: &Complex, i: usize, field: PrimeField, open: &[bool], kind: BackendKind) -> Self {
        if kind == BackendKind::Auto {
            if i == 1 {
                return AnyBackend::Graph(GraphBackend::new(complex, open));
            }
            if i + 1 == complex.d() {
                if let Some(b) = DualGraphBackend::new(complex, open) {
                    return AnyBackend::Dual(b);
                }
            }
        }
        AnyBackend::Linear(LinearBackend::new(complex, i, field, open))
    }
}

impl Backend for AnyBackend {
    fn open_mask(&self) -> &[bool] {
        match self {
            AnyBackend::Linear(b) => b.open_mask(),
            AnyBackend::Graph(b) => b.open_mask(),
            AnyBackend::Dual(b) => b.open_mask(),
        }
    }

    fn set_open(&mut self, cell: usize, open: bool) {
        match self {
            AnyBackend::Linear(b) => b.set_open(cell, open),
            AnyBackend::Graph(b) => b.set_open(cell, open),
            AnyBackend::Dual(b) => b.set_open(cell, open),
        }
    }

    fn kills_cycle(&mut self, cell: usize) -> bool {
        match self {
            AnyBackend::Linear(b) => b.kills_cycle(cell),
            AnyBackend::Graph(b) => b.kills_cycle(cell),
            AnyBackend::Dual(b) => b.kills_cycle(cell),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_box, build_torus, Boundary};
    use crate::homology::{betti, Subcomplex};
    use crate::rng::{bernoulli, below, chain_rng};

    /// Recomputes the Betti delta from scratch.
    fn oracle_kills(complex: &Complex, i: usize, field: PrimeField, open: &[bool], cell: usize) -> bool {
        let mut with = open.to_vec();
        with[cell] = true;
        let mut without = open.to_vec();
        without[cell] = false;
        let bw = betti(&Subcomplex::plaquettes(complex, i, &with).unwrap(), i - 1, field);
        let bo = betti(&Subcomplex::plaquettes(complex, i, &without).unwrap(), i - 1, field);
        assert!(bo == bw || bo == bw + 1);
        bo == bw + 1
    }

    fn check<B: Backend>(complex: &Complex, i: usize, field: PrimeField, mut backend: B, seed: u64) {
        let n = complex.num_cells(i);
        let mut rng = chain_rng(seed, 0);
        for step in 0..300 {
            let c = below(&mut rng, n as u32) as usize;
            backend.set_open(c, bernoulli(&mut rng, 0.55));
            if step % 10 == 0 {
                let open = backend.open_mask().to_vec();
                for cell in 0..n {
                    assert_eq!(backend.kills_cycle(cell), oracle_kills(complex, i, field, &open, cell));
                }
            }
        }
    }

    #[test]
    fn linear_backend_matches_recompute() {
        let f3 = PrimeField::new(3).unwrap();
        let t = build_torus(2, 3, 2).unwrap();
        check(&t, 1, f3, LinearBackend::new(&t, 1, f3, &vec![false; 18]), 1);
        let t3 = build_torus(3, 2, 3).unwrap();
        check(&t3, 2, f3, LinearBackend::new(&t3, 2, f3, &vec![true; 24]), 2);
        let f2 = PrimeField::new(2).unwrap();
        check(&t3, 2, f2, LinearBackend::new(&t3, 2, f2, &vec![false; 24]), 3);
    }

    #[test]
    fn graph_backend_matches_recompute() {
        let f2 = PrimeField::new(2).unwrap();
        let t = build_torus(2, 3, 2).unwrap();
        check(&t, 1, f2, GraphBackend::new(&t, &vec![false; 18]), 4);
        let b = build_box(3, 1, 3, Boundary::Free).unwrap();
        check(&b, 1, f2, GraphBackend::new(&b, &vec![true; 54]), 5);
    }

    #[test]
    fn dual_backend_matches_recompute() {
        let f3 = PrimeField::new(3).unwrap();
        let b = build_box(3, 1, 3, Boundary::Free).unwrap();
        check(&b, 2, f3, DualGraphBackend::new(&b, &vec![false; 36]).unwrap(), 6);
        let b2 = build_box(2, 2, 2, Boundary::Free).unwrap();
        check(&b2, 1, f3, DualGraphBackend::new(&b2, &vec![true; 40]).unwrap(), 7);
        assert!(DualGraphBackend::new(&build_torus(3, 2, 3).unwrap(), &vec![false; 24]).is_none());
    }
}
