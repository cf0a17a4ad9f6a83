//! Cubical complexes: tori and boxes, with dense per-dimension cell ids.
//!
//! A k-cell is a base vertex plus a set of k axes (stored as a bitmask, axes
//! are 0-based). Cells are canonically oriented by increasing axis order.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::PrimeField;
use crate::linalg::{normalize, SparseMatFq, SparseVec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Free,
    Wired,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Geometry {
    Torus { n: usize },
    Box { lower: Vec<i64>, upper: Vec<i64>, boundary: Boundary },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub base: Vec<i64>,
    pub dirs: Vec<usize>,
}

impl CellId {
    pub fn new(base: Vec<i64>, dirs: Vec<usize>) -> Result<Self> {
        if dirs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("dirs must be strictly increasing"));
        }
        Ok(CellId { base, dirs })
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    fn mask(&self) -> u32 {
        self.dirs.iter().fold(0, |m, &a| m | (1 << a))
    }
}

/// A chain with coefficients in a prime field, indexed by dense cell ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    dim: usize,
    field: PrimeField,
    terms: SparseVec,
}

impl Chain {
    pub fn new(dim: usize, field: PrimeField, terms: Vec<(usize, u32)>) -> Self {
        Chain { dim, field, terms: normalize(field, terms) }
    }

    /// Builds from signed integer coefficients.
    pub fn from_signed(dim: usize, field: PrimeField, terms: &[(usize, i64)]) -> Self {
        let t = terms.iter().map(|&(c, v)| (c, field.from_i64(v))).collect();
        Chain::new(dim, field, t)
    }

    pub fn zero(dim: usize, field: PrimeField) -> Self {
        Chain { dim, field, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, id: usize) -> u32 {
        crate::linalg::coeff(&self.terms, id)
    }

    pub fn boundary(&self, complex: &Complex) -> Chain {
        if self.dim == 0 {
            return Chain::zero(0, self.field);
        }
        let f = self.field;
        let mut t = Vec::new();
        for &(c, a) in &self.terms {
            for &(face, s) in complex.faces(self.dim, c) {
                t.push((face as usize, f.mul(a, f.from_i64(s as i64))));
            }
        }
        Chain::new(self.dim - 1, f, t)
    }
}

#[derive(Clone, Debug)]
struct Block {
    mask: u32,
    offset: usize,
    shape: Vec<usize>,
    stride: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Level {
    blocks: Vec<Block>,
    count: usize,
    faces: Vec<(u32, i8)>,
    coface_start: Vec<usize>,
    cofaces: Vec<(u32, i8)>,
}

/// An immutable cubical complex with all cells up to `max_dim`.
#[derive(Clone, Debug)]
pub struct Complex {
    d: usize,
    max_dim: usize,
    geometry: Geometry,
    lower: Vec<i64>,
    extent: Vec<usize>,
    levels: Vec<Level>,
    block_of_mask: Vec<u32>,
}

const MAX_D: usize = 16;

pub fn build_torus(d: usize, n: usize, max_dim: usize) -> Result<Complex> {
    if d < 1 || d > MAX_D {
        return Err(Error::InvalidParameter("dimension d out of range"));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("torus side N must be at least 2"));
    }
    Complex::build(d, max_dim, Geometry::Torus { n }, vec![0; d], vec![n; d])
}

/// The box `[-n, n]^d`.
pub fn build_box(d: usize, n: usize, max_dim: usize, boundary: Boundary) -> Result<Complex> {
    let lower = vec![-(n as i64); d];
    let upper = vec![n as i64; d];
    build_rect(lower, upper, max_dim, boundary)
}

/// The box `[0, L_1] x ... x [0, L_d]`.
pub fn build_grid(lengths: &[usize], max_dim: usize, boundary: Boundary) -> Result<Complex> {
    let lower = vec![0; lengths.len()];
    let upper = lengths.iter().map(|&l| l as i64).collect();
    build_rect(lower, upper, max_dim, boundary)
}

pub fn build_rect(lower: Vec<i64>, upper: Vec<i64>, max_dim: usize, boundary: Boundary) -> Result<Complex> {
    let d = lower.len();
    if d < 1 || d > MAX_D || upper.len() != d {
        return Err(Error::InvalidParameter("dimension d out of range"));
    }
    if lower.iter().zip(&upper).any(|(l, u)| u < l) {
        return Err(Error::InvalidParameter("empty box"));
    }
    let extent = lower.iter().zip(&upper).map(|(l, u)| (u - l + 1) as usize).collect();
    let geometry = Geometry::Box { lower: lower.clone(), upper, boundary };
    Complex::build(d, max_dim, geometry, lower, extent)
}

impl Complex {
    fn build(d: usize, max_dim: usize, geometry: Geometry, lower: Vec<i64>, extent: Vec<usize>) -> Result<Complex> {
        if max_dim < 1 || max_dim > d {
            return Err(Error::InvalidParameter("max_dim must lie in 1..=d"));
        }
        let torus = matches!(geometry, Geometry::Torus { .. });
        let mut block_of_mask = vec![u32::MAX; 1 << d];
        let mut levels = Vec::with_capacity(max_dim + 1);
        for k in 0..=max_dim {
            let mut masks: Vec<u32> = (0u32..1 << d).filter(|m| m.count_ones() as usize == k).collect();
            masks.sort_by_key(|&m| {
                let mut axes: Vec<usize> = (0..d).filter(|a| m >> a & 1 == 1).collect();
                axes.resize(d, usize::MAX);
                axes
            });
            let mut blocks = Vec::new();
            let mut offset = 0;
            for (bi, &mask) in masks.iter().enumerate() {
                let shape: Vec<usize> = (0..d)
                    .map(|a| if !torus && mask >> a & 1 == 1 { extent[a] - 1 } else { extent[a] })
                    .collect();
                let mut stride = vec![1; d];
                for a in 1..d {
                    stride[a] = stride[a - 1] * shape[a - 1];
                }
                let count: usize = shape.iter().product();
                block_of_mask[mask as usize] = bi as u32;
                blocks.push(Block { mask, offset, shape, stride });
                offset += count;
            }
            levels.push(Level { blocks, count: offset, faces: Vec::new(), coface_start: Vec::new(), cofaces: Vec::new() });
        }
        let mut c = Complex { d, max_dim, geometry, lower, extent, levels, block_of_mask };
        for k in 1..=max_dim {
            let mut faces = Vec::with_capacity(c.levels[k].count * 2 * k);
            for id in 0..c.levels[k].count {
                let cell = c.cell(k, id);
                for (l, &a) in cell.dirs.iter().enumerate() {
                    let sign: i8 = if l % 2 == 0 { 1 } else { -1 };
                    let rest: Vec<usize> = cell.dirs.iter().copied().filter(|&x| x != a).collect();
                    let minus = CellId { base: cell.base.clone(), dirs: rest.clone() };
                    let mut pb = cell.base.clone();
                    pb[a] += 1;
                    let plus = CellId { base: pb, dirs: rest };
                    faces.push((c.id(&minus).expect("face in complex") as u32, -sign));
                    faces.push((c.id(&plus).expect("face in complex") as u32, sign));
                }
            }
            c.levels[k].faces = faces;
        }
        for k in 0..max_dim {
            let n = c.levels[k].count;
            let mut counts = vec![0usize; n + 1];
            for &(f, _) in &c.levels[k + 1].faces {
                counts[f as usize + 1] += 1;
            }
            for i in 0..n {
                counts[i + 1] += counts[i];
            }
            let mut fill = counts.clone();
            let mut cof = vec![(0u32, 0i8); counts[n]];
            let stride = 2 * (k + 1);
            for (j, chunk) in c.levels[k + 1].faces.chunks(stride).enumerate() {
                for &(f, s) in chunk {
                    cof[fill[f as usize]] = (j as u32, s);
                    fill[f as usize] += 1;
                }
            }
            c.levels[k].coface_start = counts;
            c.levels[k].cofaces = cof;
        }
        Ok(c)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn torus_size(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Torus { n } => Some(n),
            _ => None,
        }
    }

    pub fn is_torus(&self) -> bool {
        self.torus_size().is_some()
    }

    pub fn boundary_condition(&self) -> Option<Boundary> {
        match &self.geometry {
            Geometry::Box { boundary, .. } => Some(*boundary),
            _ => None,
        }
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.count)
    }

    pub fn cell(&self, k: usize, id: usize) -> CellId {
        let level = &self.levels[k];
        let bi = level.blocks.partition_point(|b| b.offset <= id) - 1;
        let b = &level.blocks[bi];
        let mut r = id - b.offset;
        let mut base = vec![0i64; self.d];
        for a in 0..self.d {
            base[a] = self.lower[a] + (r % b.shape[a]) as i64;
            r /= b.shape[a];
        }
        let dirs = (0..self.d).filter(|a| b.mask >> a & 1 == 1).collect();
        CellId { base, dirs }
    }

    /// Dense id of a cell; on a torus the base is reduced mod N first.
    pub fn id(&self, cell: &CellId) -> Result<usize> {
        let k = cell.dim();
        if k > self.max_dim || cell.base.len() != self.d || cell.dirs.iter().any(|&a| a >= self.d) {
            return Err(Error::CellOutOfRange);
        }
        if cell.dirs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("dirs must be strictly increasing"));
        }
        let bi = self.block_of_mask[cell.mask() as usize] as usize;
        let b = &self.levels[k].blocks[bi];
        let mut id = b.offset;
        for a in 0..self.d {
            let x = match self.geometry {
                Geometry::Torus { n } => cell.base[a].rem_euclid(n as i64),
                _ => {
                    let x = cell.base[a] - self.lower[a];
                    if x < 0 || x >= b.shape[a] as i64 {
                        return Err(Error::CellOutOfRange);
                    }
                    x
                }
            };
            id += x as usize * b.stride[a];
        }
        Ok(id)
    }

    /// Signed faces of a k-cell, `k >= 1`.
    #[inline]
    pub fn faces(&self, k: usize, id: usize) -> &[(u32, i8)] {
        if k == 0 {
            return &[];
        }
        let s = 2 * k;
        &self.levels[k].faces[id * s..(id + 1) * s]
    }

    /// Signed cofaces of a k-cell, `k < max_dim`.
    #[inline]
    pub fn cofaces(&self, k: usize, id: usize) -> &[(u32, i8)] {
        if k >= self.max_dim {
            return &[];
        }
        let l = &self.levels[k];
        &l.cofaces[l.coface_start[id]..l.coface_start[id + 1]]
    }

    pub fn boundary(&self, cell: &CellId, field: PrimeField) -> Result<Chain> {
        let id = self.id(cell)?;
        let k = cell.dim();
        if k == 0 {
            return Ok(Chain::zero(0, field));
        }
        let t = self.faces(k, id).iter().map(|&(f, s)| (f as usize, field.from_i64(s as i64))).collect();
        Ok(Chain::new(k - 1, field, t))
    }

    pub fn coboundary_support(&self, cell: &CellId) -> Result<Vec<(CellId, i8)>> {
        let id = self.id(cell)?;
        let k = cell.dim();
        Ok(self.cofaces(k, id).iter().map(|&(c, s)| (self.cell(k + 1, c as usize), s)).collect())
    }

    pub fn boundary_matrix(&self, k: usize, field: PrimeField) -> Result<SparseMatFq> {
        if k < 1 || k > self.max_dim {
            return Err(Error::InvalidParameter("boundary_matrix needs 1 <= k <= max_dim"));
        }
        let cols = (0..self.num_cells(k))
            .map(|j| self.faces(k, j).iter().map(|&(f, s)| (f as usize, field.from_i64(s as i64))).collect())
            .collect();
        SparseMatFq::from_columns(self.num_cells(k - 1), field, cols)
    }

    /// Cells lying in the topological boundary of a box (none on a torus).
    pub fn boundary_mask(&self, k: usize) -> Vec<bool> {
        let Geometry::Box { lower, upper, .. } = &self.geometry else {
            return vec![false; self.num_cells(k)];
        };
        (0..self.num_cells(k))
            .map(|id| {
                let c = self.cell(k, id);
                (0..self.d).any(|a| !c.dirs.contains(&a) && (c.base[a] == lower[a] || c.base[a] == upper[a]))
            })
            .collect()
    }

    /// Plaquettes frozen open by wired boundary conditions.
    pub fn frozen_mask(&self, i: usize) -> Vec<bool> {
        match self.boundary_condition() {
            Some(Boundary::Wired) => self.boundary_mask(i),
            _ => vec![false; self.num_cells(i)],
        }
    }

    /// The cell of dimension `d - k` dual to k-cell `id` (torus only).
    pub fn dual_cell(&self, k: usize, id: usize) -> Result<usize> {
        let Geometry::Torus { n } = self.geometry else {
            return Err(Error::RequiresTorus);
        };
        let c = self.cell(k, id);
        let base = c.base.iter().map(|&x| (-x).rem_euclid(n as i64)).collect();
        let dirs = (0..self.d).filter(|a| !c.dirs.contains(a)).collect();
        self.id(&CellId { base, dirs })
    }

    /// Open (d-i)-cells of the dual complex of the i-configuration `open`.
    pub fn dual_complex(&self, i: usize, open: &[bool]) -> Result<Vec<bool>> {
        if !self.is_torus() {
            return Err(Error::RequiresTorus);
        }
        if i > self.d || self.max_dim < i.max(self.d - i) {
            return Err(Error::InvalidParameter("complex lacks cells needed for dualization"));
        }
        if open.len() != self.num_cells(i) {
            return Err(Error::DimensionMismatch { expected: self.num_cells(i), found: open.len() });
        }
        let mut out = vec![false; self.num_cells(self.d - i)];
        for (id, &o) in open.iter().enumerate() {
            out[self.dual_cell(i, id)?] = !o;
        }
        Ok(out)
    }

    /// Product of vertex extents per axis.
    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::math::binomial;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn counts(c: &Complex) -> Vec<usize> {
        (0..=c.max_dim()).map(|k| c.num_cells(k)).collect()
    }

    /// Oracle: enumerate all (base, dirs) with every vertex inside the box.
    fn brute_box_counts(d: usize, n: i64) -> Vec<usize> {
        let side = (2 * n + 1) as usize;
        let mut out = vec![0; d + 1];
        for mask in 0u32..1 << d {
            let k = mask.count_ones() as usize;
            for idx in 0..side.pow(d as u32) {
                let mut r = idx;
                let mut ok = true;
                for a in 0..d {
                    let x = (r % side) as i64 - n;
                    r /= side;
                    if mask >> a & 1 == 1 && x + 1 > n {
                        ok = false;
                    }
                }
                if ok {
                    out[k] += 1;
                }
            }
        }
        out
    }

    #[test]
    fn torus_counts() {
        assert_eq!(counts(&build_torus(2, 2, 2).unwrap()), vec![4, 8, 4]);
        assert_eq!(counts(&build_torus(3, 3, 2).unwrap()), vec![27, 81, 81]);
        assert_eq!(build_torus(4, 2, 2).unwrap().num_cells(2), 96);
        for d in 1..=4 {
            for n in 2..=4 {
                let c = build_torus(d, n, d).unwrap();
                for k in 0..=d {
                    assert_eq!(c.num_cells(k), binomial(d, k) * n.pow(d as u32));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_torus(2, 1, 2).is_err());
        assert!(build_torus(0, 3, 1).is_err());
        assert!(build_torus(2, 3, 3).is_err());
    }

    #[test]
    fn box_counts() {
        assert_eq!(counts(&build_box(2, 1, 2, Boundary::Free).unwrap()), vec![9, 12, 4]);
        assert_eq!(counts(&build_box(3, 1, 3, Boundary::Free).unwrap()), vec![27, 54, 36, 8]);
        assert_eq!(counts(&build_box(3, 1, 3, Boundary::Free).unwrap()), brute_box_counts(3, 1));
        assert_eq!(counts(&build_box(2, 2, 2, Boundary::Free).unwrap()), brute_box_counts(2, 2));
    }

    #[test]
    fn wired_box_freezes_boundary_edges() {
        let c = build_box(2, 1, 2, Boundary::Wired).unwrap();
        assert_eq!(counts(&c), vec![9, 12, 4]);
        let frozen = c.frozen_mask(1);
        assert_eq!(frozen.iter().filter(|&&b| b).count(), 8);
        let free = build_box(2, 1, 2, Boundary::Free).unwrap();
        assert!(free.frozen_mask(1).iter().all(|&b| !b));
    }

    #[test]
    fn edge_and_square_boundaries() {
        let c = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        let fld = f(5);
        let v = |x: i64, y: i64| c.id(&CellId { base: vec![x, y], dirs: vec![] }).unwrap();
        let e = |x: i64, y: i64, a: usize| c.id(&CellId { base: vec![x, y], dirs: vec![a] }).unwrap();
        let edge = CellId { base: vec![0, 0], dirs: vec![0] };
        assert_eq!(c.boundary(&edge, fld).unwrap(), Chain::from_signed(0, fld, &[(v(1, 0), 1), (v(0, 0), -1)]));
        let sq = CellId { base: vec![0, 0], dirs: vec![0, 1] };
        // (v1,v2) + (v2,v3) + (v3,v4) - (v1,v4) with v1..v4 counterclockwise from the origin.
        let expected = Chain::from_signed(1, fld, &[(e(0, 0, 0), 1), (e(1, 0, 1), 1), (e(0, 1, 0), -1), (e(0, 0, 1), -1)]);
        assert_eq!(c.boundary(&sq, fld).unwrap(), expected);
        let vertex = CellId { base: vec![0, 0], dirs: vec![] };
        assert!(c.boundary(&vertex, fld).unwrap().is_zero());
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let fld = f(7);
        for c in [
            build_torus(3, 3, 3).unwrap(),
            build_torus(3, 2, 3).unwrap(),
            build_torus(4, 2, 4).unwrap(),
            build_box(3, 1, 3, Boundary::Free).unwrap(),
        ] {
            for k in 2..=c.max_dim() {
                let a = c.boundary_matrix(k - 1, fld).unwrap();
                let b = c.boundary_matrix(k, fld).unwrap();
                assert!(a.mul(&b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn boundary_matrix_ranks() {
        let t = build_torus(2, 2, 2).unwrap();
        let m1 = t.boundary_matrix(1, f(2)).unwrap();
        assert_eq!((m1.nrows(), m1.ncols()), (4, 8));
        for j in 0..8 {
            let col = m1.column(j);
            assert_eq!(col.len(), 2);
            assert_eq!((col[0].1 + col[1].1) % 2, 0);
        }
        assert_eq!(rank(&m1), 3);
        let m2 = t.boundary_matrix(2, f(2)).unwrap();
        assert_eq!((m2.nrows(), m2.ncols(), rank(&m2)), (8, 4, 3));
        let b = build_box(2, 1, 2, Boundary::Free).unwrap();
        let mb = b.boundary_matrix(2, f(3)).unwrap();
        assert_eq!((mb.nrows(), mb.ncols(), rank(&mb)), (12, 4, 4));
    }

    #[test]
    fn cofaces_are_transpose_of_faces() {
        let c = build_torus(3, 2, 3).unwrap();
        let v = CellId { base: vec![0, 0, 0], dirs: vec![] };
        assert_eq!(c.coboundary_support(&v).unwrap().len(), 6);
        let t3 = build_torus(3, 3, 3).unwrap();
        let e = CellId { base: vec![1, 2, 0], dirs: vec![1] };
        assert_eq!(t3.coboundary_support(&e).unwrap().len(), 4);
        let t22 = build_torus(2, 2, 2).unwrap();
        assert_eq!(t22.coboundary_support(&CellId { base: vec![1, 1], dirs: vec![] }).unwrap().len(), 4);
        for k in 0..c.max_dim() {
            for tau in 0..c.num_cells(k) {
                for &(sigma, s) in c.cofaces(k, tau) {
                    let total: i64 = c
                        .faces(k + 1, sigma as usize)
                        .iter()
                        .filter(|x| x.0 as usize == tau)
                        .map(|x| x.1 as i64)
                        .sum();
                    assert_eq!(total, s as i64);
                }
            }
        }
    }

    #[test]
    fn ids_roundtrip() {
        for c in [build_torus(3, 3, 3).unwrap(), build_box(3, 2, 3, Boundary::Wired).unwrap()] {
            for k in 0..=c.max_dim() {
                for id in 0..c.num_cells(k) {
                    assert_eq!(c.id(&c.cell(k, id)).unwrap(), id);
                }
            }
        }
        let t = build_torus(2, 3, 2).unwrap();
        let a = t.id(&CellId { base: vec![-1, 4], dirs: vec![0] }).unwrap();
        let b = t.id(&CellId { base: vec![2, 1], dirs: vec![0] }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dualization() {
        let t = build_torus(2, 3, 2).unwrap();
        assert!(t.dual_complex(1, &vec![true; 18]).unwrap().iter().all(|&b| !b));
        let mut rng = crate::rng::chain_rng(3, 0);
        for _ in 0..100 {
            let open: Vec<bool> = (0..18).map(|_| crate::rng::bernoulli(&mut rng, 0.5)).collect();
            let dual = t.dual_complex(1, &open).unwrap();
            let eta = open.iter().filter(|&&b| b).count() + dual.iter().filter(|&&b| b).count();
            assert_eq!(eta, 18);
        }
        let t4 = build_torus(4, 2, 4).unwrap();
        for _ in 0..20 {
            let open: Vec<bool> = (0..96).map(|_| crate::rng::bernoulli(&mut rng, 0.5)).collect();
            let dual = t4.dual_complex(2, &open).unwrap();
            assert_eq!(t4.dual_complex(2, &dual).unwrap(), open);
        }
        let b = build_box(2, 1, 2, Boundary::Free).unwrap();
        assert_eq!(b.dual_complex(1, &[false; 12]), Err(Error::RequiresTorus));
    }
}
