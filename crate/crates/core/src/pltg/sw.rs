//! Plaquette Swendsen–Wang dynamics: open satisfied plaquettes independently,
//! then draw a uniform cocycle of the open subcomplex.

use alloc::vec;
use alloc::vec::Vec;

use super::{coboundary_value, decode_state, encode_state, exact_gibbs, state_count, GibbsTable};
use crate::cubical::Complex;
use crate::field::PrimeField;
use crate::graph::UnionFind;
use crate::linalg::{kernel_basis_from_rows, SparseVec};
use crate::rcm::glauber::Kernel;
use crate::rng::{below, uniform, ChainRng};
use crate::{Error, Result};

fn coboundary_row(complex: &Complex, i: usize, field: PrimeField, sigma: usize) -> SparseVec {
    let mut row: SparseVec = complex.faces(i, sigma).iter().map(|&(t, s)| (t as usize, field.from_i64(s as i64))).collect();
    row.sort_unstable_by_key(|e| e.0);
    row
}

/// Opens each satisfied plaquette with probability `p`; frozen plaquettes are
/// always open and must be satisfied.
pub fn couple_sample(
    complex: &Complex,
    i: usize,
    field: PrimeField,
    p: f64,
    f: &[u32],
    frozen: &[bool],
    rng: &mut ChainRng,
) -> Vec<bool> {
    let mut open = vec![false; complex.num_cells(i)];
    fill_bonds(complex, i, field, p, f, frozen, rng, &mut open);
    open
}

#[allow(clippy::too_many_arguments)]
fn fill_bonds(
    complex: &Complex,
    i: usize,
    field: PrimeField,
    p: f64,
    f: &[u32],
    frozen: &[bool],
    rng: &mut ChainRng,
    open: &mut [bool],
) {
    for (s, o) in open.iter_mut().enumerate() {
        let sat = coboundary_value(complex, i, field, f, s) == 0;
        *o = if frozen[s] {
            debug_assert!(sat, "frozen plaquette unsatisfied");
            true
        } else {
            sat && uniform(rng) < p
        };
    }
}

/// Canonical basis of `Z^{i-1}(P)`: the kernel of the coboundary restricted to
/// the open plaquettes, one vector per free column of its reduced row echelon form.
pub fn cocycle_basis(complex: &Complex, i: usize, field: PrimeField, open: &[bool]) -> Vec<SparseVec> {
    let rows: Vec<SparseVec> =
        (0..open.len()).filter(|&s| open[s]).map(|s| coboundary_row(complex, i, field, s)).collect();
    kernel_basis_from_rows(&rows, complex.num_cells(i - 1), field)
}

/// `Σ_g a_g g` for the given coefficients.
pub fn combine(basis: &[SparseVec], coeffs: &[u32], n: usize, field: PrimeField) -> Vec<u32> {
    let mut f = vec![0u32; n];
    for (g, &a) in basis.iter().zip(coeffs) {
        if a == 0 {
            continue;
        }
        for &(t, v) in g {
            f[t] = field.add(f[t], field.mul(a, v));
        }
    }
    f
}

/// Uniform element of the span of `basis`, with i.i.d. uniform coefficients.
pub fn couple_cocycle(basis: &[SparseVec], n: usize, field: PrimeField, rng: &mut ChainRng) -> Vec<u32> {
    let coeffs: Vec<u32> = basis.iter().map(|_| below(rng, field.modulus())).collect();
    combine(basis, &coeffs, n, field)
}

/// Swendsen–Wang chain on `(f, ω)`. For `i = 1` the cocycle draw assigns one
/// uniform value per open cluster.
#[derive(Clone, Debug)]
pub struct SwendsenWang<'a> {
    complex: &'a Complex,
    i: usize,
    field: PrimeField,
    p: f64,
    frozen: Vec<bool>,
    spins: Vec<u32>,
    open: Vec<bool>,
    rng: ChainRng,
    uf: UnionFind,
    label: Vec<u32>,
}

impl<'a> SwendsenWang<'a> {
    /// Starts from `f = 0`. Frozen plaquettes stay open, which yields the
    /// wired random-cluster marginal.
    pub fn new(complex: &'a Complex, i: usize, field: PrimeField, p: f64, frozen: Vec<bool>, rng: ChainRng) -> Result<Self> {
        if i == 0 || i > complex.max_dim() {
            return Err(Error::InvalidParameter("need 0 < i <= max_dim"));
        }
        if frozen.len() != complex.num_cells(i) {
            return Err(Error::DimensionMismatch { expected: complex.num_cells(i), found: frozen.len() });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter("p must lie in [0, 1]"));
        }
        let n = complex.num_cells(i - 1);
        Ok(SwendsenWang {
            complex,
            i,
            field,
            p,
            open: frozen.clone(),
            frozen,
            spins: vec![0; n],
            rng,
            uf: UnionFind::new(if i == 1 { n } else { 0 }),
            label: vec![u32::MAX; if i == 1 { n } else { 0 }],
        })
    }

    pub fn set_p(&mut self, p: f64) {
        self.p = p;
    }

    pub fn step(&mut self) {
        fill_bonds(self.complex, self.i, self.field, self.p, &self.spins, &self.frozen, &mut self.rng, &mut self.open);
        if self.i == 1 {
            self.redraw_clusters();
        } else {
            let basis = cocycle_basis(self.complex, self.i, self.field, &self.open);
            self.spins = couple_cocycle(&basis, self.spins.len(), self.field, &mut self.rng);
        }
    }

    fn redraw_clusters(&mut self) {
        let n = self.spins.len();
        self.uf = UnionFind::new(n);
        for (e, &o) in self.open.iter().enumerate() {
            if o {
                let fs = self.complex.faces(1, e);
                self.uf.union(fs[0].0 as usize, fs[1].0 as usize);
            }
        }
        self.label.iter_mut().for_each(|l| *l = u32::MAX);
        for v in 0..n {
            let r = self.uf.find(v);
            if self.label[r] == u32::MAX {
                self.label[r] = below(&mut self.rng, self.field.modulus());
            }
            self.spins[v] = self.label[r];
        }
    }

    pub fn spins(&self) -> &[u32] {
        &self.spins
    }

    /// Plaquettes opened by the last step.
    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn set_spins(&mut self, f: Vec<u32>) -> Result<()> {
        if f.len() != self.spins.len() {
            return Err(Error::DimensionMismatch { expected: self.spins.len(), found: f.len() });
        }
        self.spins = f;
        Ok(())
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }
}

/// Exact transition matrix of one step, obtained by running the bond draw and
/// the canonical-basis cocycle draw over every outcome.
pub fn sw_transition_kernel(complex: &Complex, i: usize, field: PrimeField, beta: f64) -> Result<(GibbsTable, Kernel)> {
    let table = exact_gibbs(complex, i, field, beta)?;
    let m = complex.num_cells(i);
    if m > 20 {
        return Err(Error::TooLarge { cells: m, limit: 20 });
    }
    let n = table.n_spins;
    let q = field.modulus();
    let states = table.probs.len();
    if states > 4096 {
        return Err(Error::TooLarge { cells: n, limit: 4096 });
    }
    let p = super::bond_probability(beta);
    let mut k = Kernel { n: states, data: vec![0.0; states * states] };
    for s in 0..states {
        let f = decode_state(s, n, q);
        let sat: usize = (0..m).filter(|&x| coboundary_value(complex, i, field, &f, x) == 0).map(|x| 1 << x).sum();
        let n_sat = sat.count_ones() as i32;
        let mut sub = sat;
        loop {
            let k_open = sub.count_ones() as i32;
            let prob = crate::math::powf(p, k_open as f64) * crate::math::powf(1.0 - p, (n_sat - k_open) as f64);
            let open: Vec<bool> = (0..m).map(|x| sub >> x & 1 == 1).collect();
            let basis = cocycle_basis(complex, i, field, &open);
            let outcomes = state_count(basis.len(), q)?;
            let share = prob / outcomes as f64;
            for c in 0..outcomes {
                let coeffs = decode_state(c, basis.len(), q);
                let g = combine(&basis, &coeffs, n, field);
                k.data[s * states + encode_state(&g, q)] += share;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & sat;
        }
    }
    Ok((table, k))
}

/// Whether `after - before` shifts the Wilson phase of every translate of some
/// coordinate generator cycle by the same nonzero amount. On a torus these
/// generators are the coordinate (i-1)-subtori.
pub fn coherent_shift(complex: &Complex, i: usize, field: PrimeField, before: &[u32], after: &[u32]) -> Result<bool> {
    let n = complex.torus_size().ok_or(Error::RequiresTorus)?;
    let d = complex.d();
    let k = i - 1;
    // Phase sums keyed by (direction set, translate).
    let mut sums: Vec<(Vec<usize>, usize, u32)> = Vec::new();
    let mut index: alloc::collections::BTreeMap<(Vec<usize>, usize), usize> = alloc::collections::BTreeMap::new();
    for t in 0..complex.num_cells(k) {
        let cell = complex.cell(k, t);
        let mut translate = 0usize;
        for a in (0..d).filter(|a| !cell.dirs.contains(a)) {
            translate = translate * n + cell.base[a].rem_euclid(n as i64) as usize;
        }
        let delta = field.sub(after[t], before[t]);
        let key = (cell.dirs.clone(), translate);
        let slot = *index.entry(key).or_insert_with(|| {
            sums.push((cell.dirs.clone(), translate, 0));
            sums.len() - 1
        });
        sums[slot].2 = field.add(sums[slot].2, delta);
    }
    let mut by_dirs: alloc::collections::BTreeMap<Vec<usize>, Vec<u32>> = alloc::collections::BTreeMap::new();
    for (dirs, _, s) in sums {
        by_dirs.entry(dirs).or_default().push(s);
    }
    Ok(by_dirs.values().any(|v| v[0] != 0 && v.iter().all(|&x| x == v[0])))
}
