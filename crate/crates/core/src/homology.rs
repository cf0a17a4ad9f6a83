//! Betti numbers, giant and local cycles, and duality checks over F_q.

use alloc::vec;
use alloc::vec::Vec;

use crate::cubical::{Chain, Complex};
use crate::field::PrimeField;
use crate::linalg::{kernel_basis, rank, solve_sparse, SparseMatFq, SparseVec};
use crate::math::binomial;
use crate::{Error, Result};

const ABSENT: usize = usize::MAX;

/// A subcomplex given by one membership mask per dimension `0..=top`.
#[derive(Clone, Debug)]
pub struct Subcomplex<'a> {
    complex: &'a Complex,
    masks: Vec<Vec<bool>>,
}

impl<'a> Subcomplex<'a> {
    /// Validates that every face of a member is a member.
    pub fn from_masks(complex: &'a Complex, masks: Vec<Vec<bool>>) -> Result<Self> {
        if masks.len() > complex.max_dim() + 1 {
            return Err(Error::InvalidParameter("subcomplex exceeds max_dim"));
        }
        for (k, m) in masks.iter().enumerate() {
            if m.len() != complex.num_cells(k) {
                return Err(Error::DimensionMismatch { expected: complex.num_cells(k), found: m.len() });
            }
            if k > 0 {
                for (id, _) in m.iter().enumerate().filter(|e| *e.1) {
                    if complex.faces(k, id).iter().any(|&(f, _)| !masks[k - 1][f as usize]) {
                        return Err(Error::InvalidParameter("subcomplex is not closed under faces"));
                    }
                }
            }
        }
        Ok(Subcomplex { complex, masks })
    }

    /// The whole complex up to dimension `top`.
    pub fn full(complex: &'a Complex, top: usize) -> Self {
        let masks = (0..=top.min(complex.max_dim())).map(|k| vec![true; complex.num_cells(k)]).collect();
        Subcomplex { complex, masks }
    }

    /// Full (i-1)-skeleton plus the open i-plaquettes.
    pub fn plaquettes(complex: &'a Complex, i: usize, open: &[bool]) -> Result<Self> {
        if i == 0 || i > complex.max_dim() {
            return Err(Error::InvalidParameter("plaquette dimension out of range"));
        }
        if open.len() != complex.num_cells(i) {
            return Err(Error::DimensionMismatch { expected: complex.num_cells(i), found: open.len() });
        }
        let mut masks: Vec<Vec<bool>> = (0..i).map(|k| vec![true; complex.num_cells(k)]).collect();
        masks.push(open.to_vec());
        Ok(Subcomplex { complex, masks })
    }

    pub fn complex(&self) -> &'a Complex {
        self.complex
    }

    pub fn top_dim(&self) -> usize {
        self.masks.len() - 1
    }

    pub fn contains(&self, k: usize, id: usize) -> bool {
        self.masks.get(k).is_some_and(|m| m[id])
    }

    pub fn count(&self, k: usize) -> usize {
        self.masks.get(k).map_or(0, |m| m.iter().filter(|&&b| b).count())
    }

    pub fn cells(&self, k: usize) -> Vec<usize> {
        self.masks.get(k).map_or(Vec::new(), |m| (0..m.len()).filter(|&c| m[c]).collect())
    }

    fn positions(&self, k: usize) -> Vec<usize> {
        let mut pos = vec![ABSENT; self.complex.num_cells(k)];
        for (n, c) in self.cells(k).into_iter().enumerate() {
            pos[c] = n;
        }
        pos
    }

    /// Boundary map from member k-cells to member (k-1)-cells.
    pub fn boundary_matrix(&self, k: usize, field: PrimeField) -> SparseMatFq {
        let cols_cells = self.cells(k);
        if k == 0 {
            return SparseMatFq::zeros(0, cols_cells.len(), field);
        }
        let rows = self.positions(k - 1);
        let cols = cols_cells
            .iter()
            .map(|&c| {
                self.complex
                    .faces(k, c)
                    .iter()
                    .map(|&(f, s)| (rows[f as usize], field.from_i64(s as i64)))
                    .collect()
            })
            .collect();
        SparseMatFq::from_columns(self.count(k - 1), field, cols).expect("faces are members")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomologySummary {
    pub k: usize,
    pub betti: usize,
    pub local: usize,
    pub giant: usize,
}

/// `dim H_k` of the subcomplex over `field`.
pub fn betti(sub: &Subcomplex, k: usize, field: PrimeField) -> usize {
    if k > sub.top_dim() {
        return 0;
    }
    let n = sub.count(k);
    let rk = if k == 0 { 0 } else { rank(&sub.boundary_matrix(k, field)) };
    let rk1 = if k < sub.top_dim() { rank(&sub.boundary_matrix(k + 1, field)) } else { 0 };
    n - rk - rk1
}

pub fn betti_numbers(sub: &Subcomplex, field: PrimeField) -> Vec<usize> {
    (0..=sub.top_dim()).map(|k| betti(sub, k, field)).collect()
}

/// Supports of the standard torus cocycles in degree `k`, one per k-subset
/// `D` of axes: the k-cells with direction set `D` and base coordinates 0 on `D`.
pub fn torus_cocycles(complex: &Complex, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = complex.torus_size().ok_or(Error::RequiresTorus)?;
    let d = complex.d();
    let mut out = Vec::new();
    for mask in 0u32..1 << d {
        if mask.count_ones() as usize != k {
            continue;
        }
        let dirs: Vec<usize> = (0..d).filter(|a| mask >> a & 1 == 1).collect();
        let free: Vec<usize> = (0..d).filter(|a| mask >> a & 1 == 0).collect();
        let mut cells = Vec::new();
        for idx in 0..n.pow(free.len() as u32) {
            let mut base = vec![0i64; d];
            let mut r = idx;
            for &a in &free {
                base[a] = (r % n) as i64;
                r /= n;
            }
            cells.push(complex.id(&crate::cubical::CellId { base, dirs: dirs.clone() })?);
        }
        cells.sort_unstable();
        out.push(cells);
    }
    out.sort();
    Ok(out)
}

/// Rank of `H_k(P) -> H_k(T)`, by pairing cycles of `P` with the torus cocycles.
pub fn giant_rank(sub: &Subcomplex, k: usize, field: PrimeField) -> Result<usize> {
    if k > sub.top_dim() {
        return Ok(0);
    }
    let cocycles = torus_cocycles(sub.complex, k)?;
    let bd = sub.boundary_matrix(k, field);
    let pos = sub.positions(k);
    let mut cols: Vec<SparseVec> = vec![Vec::new(); bd.ncols()];
    for (r, support) in cocycles.iter().enumerate() {
        for &c in support {
            if pos[c] != ABSENT {
                cols[pos[c]].push((r, 1));
            }
        }
    }
    let zeta = SparseMatFq::from_columns(cocycles.len(), field, cols)?;
    let stacked = bd.vstack(&zeta)?;
    Ok(rank(&stacked) - rank(&bd))
}

/// `dim` of the kernel of `H_k(P) -> H_k(T)`, computed from the ambient
/// boundaries: `dim(Z_k(P) ∩ B_k(T)) - dim B_k(P)`.
pub fn local_dim(sub: &Subcomplex, k: usize, field: PrimeField) -> Result<usize> {
    let complex = sub.complex;
    if k > sub.top_dim() {
        return Ok(0);
    }
    let cells = sub.cells(k);
    let cycles = kernel_basis(&sub.boundary_matrix(k, field));
    let ambient: Vec<SparseVec> = if k < complex.d() {
        if complex.max_dim() < k + 1 {
            return Err(Error::InvalidParameter("ambient complex lacks (k+1)-cells"));
        }
        complex.boundary_matrix(k + 1, field)?.columns().to_vec()
    } else {
        Vec::new()
    };
    let n = complex.num_cells(k);
    let amb = SparseMatFq::from_columns(n, field, ambient.clone())?;
    let rank_b = rank(&amb);
    let mut joint = ambient;
    for z in &cycles {
        joint.push(z.iter().map(|&(p, v)| (cells[p], v)).collect());
    }
    let rank_joint = rank(&SparseMatFq::from_columns(n, field, joint)?);
    let inter = cycles.len() + rank_b - rank_joint;
    let bp = if k < sub.top_dim() { rank(&sub.boundary_matrix(k + 1, field)) } else { 0 };
    Ok(inter - bp)
}

/// Betti number, local and giant parts, each computed independently.
pub fn induced_summary(sub: &Subcomplex, k: usize, field: PrimeField) -> Result<HomologySummary> {
    Ok(HomologySummary {
        k,
        betti: betti(sub, k, field),
        local: local_dim(sub, k, field)?,
        giant: giant_rank(sub, k, field)?,
    })
}

/// Whether the cycle `gamma` bounds a chain supported on `sub`.
pub fn is_null_homologous(gamma: &Chain, sub: &Subcomplex, field: PrimeField) -> Result<bool> {
    let k = gamma.dim();
    if !gamma.boundary(sub.complex).is_zero() {
        return Err(Error::NotACycle);
    }
    if gamma.terms().iter().any(|&(c, _)| !sub.contains(k, c)) {
        return Err(Error::NotInComplex);
    }
    if gamma.is_zero() {
        return Ok(true);
    }
    if k + 1 > sub.top_dim() {
        return Ok(false);
    }
    let pos = sub.positions(k);
    let mut b: SparseVec = gamma.terms().iter().map(|&(c, v)| (pos[c], v)).collect();
    b.sort_unstable_by_key(|e| e.0);
    Ok(solve_sparse(&sub.boundary_matrix(k + 1, field), &b).is_some())
}

pub fn euler_characteristic(sub: &Subcomplex) -> i64 {
    (0..=sub.top_dim()).map(|k| if k % 2 == 0 { sub.count(k) as i64 } else { -(sub.count(k) as i64) }).sum()
}

/// Returns `(chi, alternating Betti sum, equal)`.
pub fn euler_poincare_check(sub: &Subcomplex, field: PrimeField) -> (i64, i64, bool) {
    let chi = euler_characteristic(sub);
    let alt: i64 = betti_numbers(sub, field)
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    (chi, alt, chi == alt)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlexanderReport {
    pub d: usize,
    pub i: usize,
    pub eta: usize,
    /// Summaries of P for k = 0..=d.
    pub primal: Vec<HomologySummary>,
    /// Summaries of the dual complex for k = 0..=d.
    pub dual: Vec<HomologySummary>,
    /// a_k + b_k = betti_k for P and its dual, all k.
    pub eq1: bool,
    /// b_k + b•_{d-k} = C(d,k) for all k.
    pub eq2: bool,
    /// a_k = a•_{d-k-1} for 0 <= k <= d-1.
    pub eq3: bool,
    /// betti_i - betti_{i-1} - eta.
    pub offset: i64,
}

pub fn alexander_check(complex: &Complex, i: usize, open: &[bool], field: PrimeField) -> Result<AlexanderReport> {
    let d = complex.d();
    if !complex.is_torus() {
        return Err(Error::RequiresTorus);
    }
    if complex.max_dim() < d || i == 0 || i >= d {
        return Err(Error::InvalidParameter("need a full torus and 0 < i < d"));
    }
    let dual_open = complex.dual_complex(i, open)?;
    let p = Subcomplex::plaquettes(complex, i, open)?;
    let pd = Subcomplex::plaquettes(complex, d - i, &dual_open)?;
    let primal = (0..=d).map(|k| induced_summary(&p, k, field)).collect::<Result<Vec<_>>>()?;
    let dual = (0..=d).map(|k| induced_summary(&pd, k, field)).collect::<Result<Vec<_>>>()?;
    let eq1 = primal.iter().chain(&dual).all(|s| s.local + s.giant == s.betti);
    let eq2 = (0..=d).all(|k| primal[k].giant + dual[d - k].giant == binomial(d, k));
    let eq3 = (0..d).all(|k| primal[k].local == dual[d - k - 1].local);
    let eta = open.iter().filter(|&&b| b).count();
    let offset = primal[i].betti as i64 - primal[i - 1].betti as i64 - eta as i64;
    Ok(AlexanderReport { d, i, eta, primal, dual, eq1, eq2, eq3, offset })
}

/// The constant `c` with `betti_i - betti_{i-1} = eta + c`, from the empty configuration.
pub fn eta_offset_constant(complex: &Complex, i: usize, field: PrimeField) -> Result<i64> {
    let empty = vec![false; complex.num_cells(i)];
    let p = Subcomplex::plaquettes(complex, i, &empty)?;
    Ok(betti(&p, i, field) as i64 - betti(&p, i - 1, field) as i64)
}

/// A chain complex given by integer boundary matrices, for complexes that are
/// not cubical subcomplexes (e.g. the Klein bottle).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[k-1]` is ∂_k as dense rows, `dims[k-1] x dims[k]`.
    boundaries: Vec<Vec<Vec<i64>>>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::InvalidParameter("need one boundary matrix per positive degree"));
        }
        for (k, m) in boundaries.iter().enumerate() {
            if m.len() != dims[k] || m.iter().any(|r| r.len() != dims[k + 1]) {
                return Err(Error::DimensionMismatch { expected: dims[k], found: m.len() });
            }
        }
        for k in 1..boundaries.len() {
            let (a, b) = (&boundaries[k - 1], &boundaries[k]);
            for r in 0..dims[k - 1] {
                for c in 0..dims[k + 1] {
                    let s: i64 = (0..dims[k]).map(|j| a[r][j] * b[j][c]).sum();
                    if s != 0 {
                        return Err(Error::InvalidParameter("boundary matrices do not compose to zero"));
                    }
                }
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    fn rank_of(&self, k: usize, field: PrimeField) -> usize {
        if k == 0 || k >= self.dims.len() {
            return 0;
        }
        rank(&SparseMatFq::from_dense_rows(&self.boundaries[k - 1], self.dims[k], field))
    }

    pub fn betti(&self, k: usize, field: PrimeField) -> usize {
        if k >= self.dims.len() {
            return 0;
        }
        self.dims[k] - self.rank_of(k, field) - self.rank_of(k + 1, field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_box, build_grid, build_torus, Boundary, CellId};
    use crate::rng::{bernoulli, chain_rng};

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn empty_square_has_one_loop() {
        let c = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        let p = Subcomplex::plaquettes(&c, 2, &[false]).unwrap();
        assert_eq!(betti_numbers(&p, f(2)), vec![1, 1, 0]);
        assert_eq!(euler_poincare_check(&p, f(3)), (0, 0, true));
    }

    #[test]
    fn klein_bottle_torsion() {
        let k = ChainComplex::new(vec![1, 2, 1], vec![vec![vec![0, 0]], vec![vec![2], vec![0]]]).unwrap();
        assert_eq!(k.betti(2, f(2)), 1);
        assert_eq!(k.betti(2, f(3)), 0);
        assert_eq!(k.betti(1, f(2)), 2);
        assert_eq!(k.betti(1, f(3)), 1);
        assert_eq!(k.betti(0, f(3)), 1);
        assert!(ChainComplex::new(vec![1, 2, 1], vec![vec![vec![1, 0]], vec![vec![2], vec![0]]]).is_err());
    }

    #[test]
    fn torus_betti_numbers() {
        for (d, i) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let c = build_torus(d, if d == 4 { 2 } else { 3 }, d).unwrap();
            let full = Subcomplex::full(&c, d);
            for q in [2, 3] {
                assert_eq!(betti(&full, i, f(q)), binomial(d, i));
            }
        }
        let c = build_torus(2, 3, 2).unwrap();
        assert_eq!(euler_characteristic(&Subcomplex::full(&c, 2)), 0);
    }

    #[test]
    fn induced_summary_examples() {
        let c = build_torus(3, 2, 3).unwrap();
        let full = Subcomplex::plaquettes(&c, 2, &vec![true; c.num_cells(2)]).unwrap();
        let s = induced_summary(&full, 2, f(2)).unwrap();
        assert_eq!(s.giant, 3);
        assert_eq!(s.local + s.giant, s.betti);
        let skel = Subcomplex::plaquettes(&c, 2, &vec![false; c.num_cells(2)]).unwrap();
        let s = induced_summary(&skel, 2, f(3)).unwrap();
        assert_eq!((s.betti, s.giant), (0, 0));

        let t = build_torus(2, 3, 2).unwrap();
        let mut masks = vec![vec![true; 9], vec![false; 18]];
        for x in 0..3 {
            masks[1][t.id(&CellId { base: vec![x, 1], dirs: vec![0] }).unwrap()] = true;
        }
        let loop_ = Subcomplex::from_masks(&t, masks).unwrap();
        let s = induced_summary(&loop_, 1, f(2)).unwrap();
        assert_eq!((s.betti, s.giant, s.local), (1, 1, 0));
    }

    #[test]
    fn null_homology_examples() {
        let fld = f(3);
        let t = build_torus(2, 4, 2).unwrap();
        let sq = |x: i64, y: i64| t.id(&CellId { base: vec![x, y], dirs: vec![0, 1] }).unwrap();
        let one = Chain::new(2, fld, vec![(sq(0, 0), 1)]).boundary(&t);
        let mut open = vec![false; 16];
        let skel = Subcomplex::plaquettes(&t, 2, &open).unwrap();
        assert!(!is_null_homologous(&one, &skel, fld).unwrap());
        open[sq(0, 0)] = true;
        let p = Subcomplex::plaquettes(&t, 2, &open).unwrap();
        assert!(is_null_homologous(&one, &p, fld).unwrap());
        let rect = Chain::new(2, fld, vec![(sq(0, 0), 1), (sq(1, 0), 1), (sq(0, 1), 1), (sq(1, 1), 1)]).boundary(&t);
        let mut open = vec![false; 16];
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            open[sq(x, y)] = true;
        }
        let p = Subcomplex::plaquettes(&t, 2, &open).unwrap();
        assert!(is_null_homologous(&rect, &p, fld).unwrap());
        let e = t.id(&CellId { base: vec![0, 0], dirs: vec![0] }).unwrap();
        let bad = Chain::new(1, fld, vec![(e, 1)]);
        assert_eq!(is_null_homologous(&bad, &p, fld), Err(Error::NotACycle));
    }

    #[test]
    fn eta_offset_examples() {
        let t = build_torus(2, 2, 2).unwrap();
        assert_eq!(eta_offset_constant(&t, 1, f(2)).unwrap(), -4);
        let t3 = build_torus(2, 3, 2).unwrap();
        let c = eta_offset_constant(&t3, 1, f(3)).unwrap();
        let mut rng = chain_rng(5, 0);
        for _ in 0..200 {
            let open: Vec<bool> = (0..18).map(|_| bernoulli(&mut rng, 0.5)).collect();
            let p = Subcomplex::plaquettes(&t3, 1, &open).unwrap();
            let eta = open.iter().filter(|&&b| b).count() as i64;
            assert_eq!(betti(&p, 1, f(3)) as i64 - betti(&p, 0, f(3)) as i64 - eta, c);
        }
        let t4 = build_torus(4, 2, 4).unwrap();
        let c4 = eta_offset_constant(&t4, 2, f(3)).unwrap();
        for _ in 0..50 {
            let open: Vec<bool> = (0..96).map(|_| bernoulli(&mut rng, 0.5)).collect();
            let r = alexander_check(&t4, 2, &open, f(3)).unwrap();
            assert_eq!(r.offset, c4);
        }
    }

    #[test]
    fn alexander_duality_holds() {
        let mut rng = chain_rng(9, 0);
        for (d, n, i) in [(2, 3, 1), (3, 2, 1), (3, 2, 2), (4, 2, 2), (4, 2, 1), (4, 2, 3)] {
            let t = build_torus(d, n, d).unwrap();
            let m = t.num_cells(i);
            for q in [2, 3] {
                for trial in 0..6 {
                    let p = [0.0, 1.0, 0.3, 0.5, 0.7, 0.5][trial];
                    let open: Vec<bool> = (0..m).map(|_| bernoulli(&mut rng, p)).collect();
                    let r = alexander_check(&t, i, &open, f(q)).unwrap();
                    assert!(r.eq1 && r.eq2 && r.eq3, "{d} {n} {i} {q} {r:?}");
                    if trial == 0 {
                        assert_eq!((r.primal[i].giant, r.dual[d - i].giant), (0, binomial(d, i)));
                    }
                    if trial == 1 {
                        assert_eq!((r.primal[i].giant, r.dual[d - i].giant), (binomial(d, i), 0));
                    }
                }
            }
        }
    }

    #[test]
    fn boxes_need_torus_for_giant_cycles() {
        let b = build_box(2, 1, 2, Boundary::Free).unwrap();
        let p = Subcomplex::full(&b, 2);
        assert_eq!(giant_rank(&p, 1, f(2)), Err(Error::RequiresTorus));
    }
}
