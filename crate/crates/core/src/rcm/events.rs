//! Per-configuration observables: giant-cycle events and null-homology of a loop.

use alloc::vec;
use alloc::vec::Vec;

use crate::cubical::{Chain, Complex};
use crate::field::PrimeField;
use crate::graph::{PotentialUnionFind, UnionFind, WindingUnionFind};
use crate::homology::{giant_rank, is_null_homologous, Subcomplex};
use crate::linalg::{solve_sparse, Echelon};
use crate::math::binomial;
use crate::rcm::backend::DualGraphBackend;
use crate::{Error, Result};

/// An (i-1)-cycle together with an i-chain of the ambient complex bounding it,
/// when one exists.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleTarget {
    pub gamma: Chain,
    pub filling: Option<Chain>,
}

impl CycleTarget {
    pub fn from_filling(complex: &Complex, filling: Chain) -> Self {
        CycleTarget { gamma: filling.boundary(complex), filling: Some(filling) }
    }

    pub fn new(complex: &Complex, gamma: Chain) -> Result<Self> {
        if !gamma.boundary(complex).is_zero() {
            return Err(Error::NotACycle);
        }
        let k = gamma.dim();
        let filling = if k < complex.max_dim() {
            let m = complex.boundary_matrix(k + 1, gamma.field())?;
            solve_sparse(&m, gamma.terms()).map(|x| Chain::new(k + 1, gamma.field(), x))
        } else {
            None
        };
        Ok(CycleTarget { gamma, filling })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    /// Some giant i-cycle exists.
    A,
    /// Every homology class of the torus is hit.
    S,
    /// The loop bounds in the configuration.
    V(CycleTarget),
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::A => "A",
            Event::S => "S",
            Event::V(_) => "V",
        }
    }
}

/// Evaluates events on plaquette configurations, using graph fast paths when
/// they apply.
#[derive(Clone, Debug)]
pub struct EventEvaluator<'a> {
    complex: &'a Complex,
    i: usize,
    field: PrimeField,
    dual: Option<DualGraphBackend>,
}

impl<'a> EventEvaluator<'a> {
    pub fn new(complex: &'a Complex, i: usize, field: PrimeField) -> Self {
        let dual = if i + 1 == complex.d() && i > 1 {
            DualGraphBackend::new(complex, &vec![false; complex.num_cells(i)])
        } else {
            None
        };
        EventEvaluator { complex, i, field, dual }
    }

    pub fn giant(&self, open: &[bool]) -> Result<usize> {
        if !self.complex.is_torus() {
            return Err(Error::RequiresTorus);
        }
        if self.i == 1 {
            Ok(giant_rank_graph(self.complex, open, self.field))
        } else {
            giant_rank(&Subcomplex::plaquettes(self.complex, self.i, open)?, self.i, self.field)
        }
    }

    pub fn null_homologous(&self, target: &CycleTarget, open: &[bool]) -> Result<bool> {
        if self.i == 1 {
            return Ok(null_homologous_graph(self.complex, open, &target.gamma));
        }
        if let (Some(dual), Some(fill)) = (&self.dual, &target.filling) {
            return Ok(null_homologous_dual(dual, open, fill, self.field));
        }
        is_null_homologous(&target.gamma, &Subcomplex::plaquettes(self.complex, self.i, open)?, self.field)
    }

    pub fn eval(&self, event: &Event, open: &[bool]) -> Result<bool> {
        match event {
            Event::A => Ok(self.giant(open)? >= 1),
            Event::S => Ok(self.giant(open)? == binomial(self.complex.d(), self.i)),
            Event::V(t) => self.null_homologous(t, open),
        }
    }
}

/// Giant rank of a 1-dimensional configuration on a torus, from the winding
/// vectors of the loops closed by open edges.
pub fn giant_rank_graph(complex: &Complex, open: &[bool], field: PrimeField) -> usize {
    let d = complex.d();
    let n = complex.torus_size().expect("torus") as i32;
    let mut uf = WindingUnionFind::new(complex.num_cells(0), d);
    let mut ech = Echelon::new(d, field);
    let mut disp = vec![0i32; d];
    let mut wind = vec![0i32; d];
    for e in (0..open.len()).filter(|&e| open[e]) {
        let f = complex.faces(1, e);
        let (tail, head) = (f[0].0 as usize, f[1].0 as usize);
        let axis = complex.cell(1, e).dirs[0];
        disp.fill(0);
        disp[axis] = 1;
        if uf.join(tail, head, &disp, &mut wind) {
            let v: Vec<(usize, u32)> = wind
                .iter()
                .enumerate()
                .map(|(a, &w)| (a, field.from_i64((w / n) as i64)))
                .filter(|e| e.1 != 0)
                .collect();
            if !v.is_empty() && ech.insert(&v) && ech.rank() == d {
                break;
            }
        }
    }
    ech.rank()
}

/// A 0-cycle bounds iff its coefficients sum to zero on every component.
pub fn null_homologous_graph(complex: &Complex, open: &[bool], gamma: &Chain) -> bool {
    let mut uf = UnionFind::new(complex.num_cells(0));
    for e in (0..open.len()).filter(|&e| open[e]) {
        let f = complex.faces(1, e);
        uf.union(f[0].0 as usize, f[1].0 as usize);
    }
    let field = gamma.field();
    let mut sums: Vec<(usize, u32)> = gamma.terms().iter().map(|&(v, a)| (uf.find(v), a)).collect();
    sums.sort_unstable_by_key(|e| e.0);
    let mut k = 0;
    while k < sums.len() {
        let mut s = 0;
        let r = sums[k].0;
        while k < sums.len() && sums[k].0 == r {
            s = field.add(s, sums[k].1);
            k += 1;
        }
        if s != 0 {
            return false;
        }
    }
    true
}

/// For `i = d - 1` on a box: the loop bounds iff `filling + ∂g` can vanish on
/// every closed plaquette for some d-chain `g`, a potential problem on the
/// dual graph.
pub fn null_homologous_dual(dual: &DualGraphBackend, open: &[bool], filling: &Chain, field: PrimeField) -> bool {
    let mut uf = PotentialUnionFind::new(dual.num_nodes(), field);
    let mut coeff = vec![0u32; open.len()];
    for &(c, v) in filling.terms() {
        coeff[c] = v;
    }
    for s in (0..open.len()).filter(|&s| !open[s]) {
        let (u, v, sign) = dual.dual_edge(s);
        let c = if sign > 0 { field.neg(coeff[s]) } else { coeff[s] };
        if !uf.constrain(u, v, c) {
            return false;
        }
    }
    true
}
