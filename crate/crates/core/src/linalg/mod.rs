//! Exact sparse linear algebra over prime fields.
//!
//! Sparse vectors are sorted `(index, value)` lists without zeros.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::PrimeField;
use crate::{Error, Result};

pub mod dense;
mod incremental;

pub use incremental::IncrementalSpan;

pub type SparseVec = Vec<(usize, u32)>;

const NONE: usize = usize::MAX;

/// `y + a·x`.
pub fn axpy(field: PrimeField, y: &[(usize, u32)], a: u32, x: &[(usize, u32)]) -> SparseVec {
    if a == 0 {
        return y.to_vec();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i]);
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, field.mul(a, x[j].1)));
            j += 1;
        } else {
            let v = field.add(y[i].1, field.mul(a, x[j].1));
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(field: PrimeField, x: &mut SparseVec, a: u32) {
    for e in x.iter_mut() {
        e.1 = field.mul(e.1, a);
    }
}

/// Coefficient of `idx` in `x`.
pub fn coeff(x: &[(usize, u32)], idx: usize) -> u32 {
    match x.binary_search_by_key(&idx, |e| e.0) {
        Ok(k) => x[k].1,
        Err(_) => 0,
    }
}

/// Sorts, merges duplicates and drops zeros.
pub fn normalize(field: PrimeField, mut x: Vec<(usize, u32)>) -> SparseVec {
    x.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(x.len());
    for (i, v) in x {
        let v = v % field.modulus();
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = field.add(last.1, v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

pub fn to_dense(x: &[(usize, u32)], len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for &(i, v) in x {
        out[i] = v;
    }
    out
}

pub fn from_dense(x: &[u32]) -> SparseVec {
    x.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &v)| (i, v)).collect()
}

/// Dense scratch accumulator for repeated sparse updates.
#[derive(Clone, Debug)]
pub(crate) struct Accumulator {
    values: Vec<u32>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Accumulator {
    pub fn new(len: usize) -> Self {
        Accumulator { values: vec![0; len], touched: Vec::new(), mark: vec![false; len] }
    }

    #[inline]
    pub fn add(&mut self, field: PrimeField, idx: usize, v: u32) {
        if !self.mark[idx] {
            self.mark[idx] = true;
            self.touched.push(idx);
        }
        self.values[idx] = field.add(self.values[idx], v);
    }

    pub fn axpy(&mut self, field: PrimeField, a: u32, x: &[(usize, u32)]) {
        for &(i, v) in x {
            self.add(field, i, field.mul(a, v));
        }
    }

    pub fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            if self.values[i] != 0 {
                out.push((i, self.values[i]));
            }
            self.values[i] = 0;
            self.mark[i] = false;
        }
        self.touched.clear();
        out
    }
}

/// Column-major sparse matrix over a prime field.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatFq {
    nrows: usize,
    ncols: usize,
    field: PrimeField,
    cols: Vec<SparseVec>,
}

impl SparseMatFq {
    pub fn zeros(nrows: usize, ncols: usize, field: PrimeField) -> Self {
        SparseMatFq { nrows, ncols, field, cols: vec![Vec::new(); ncols] }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        SparseMatFq { nrows: n, ncols: n, field, cols: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    /// Builds from columns; entries are reduced, merged and sorted.
    pub fn from_columns(nrows: usize, field: PrimeField, cols: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        let mut out = Vec::with_capacity(cols.len());
        for c in cols {
            if c.iter().any(|e| e.0 >= nrows) {
                return Err(Error::CellOutOfRange);
            }
            out.push(normalize(field, c));
        }
        Ok(SparseMatFq { nrows, ncols: out.len(), field, cols: out })
    }

    /// Builds from signed integer entries given row by row.
    pub fn from_dense_rows(rows: &[Vec<i64>], ncols: usize, field: PrimeField) -> Self {
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols);
            for (c, &v) in row.iter().enumerate() {
                let v = field.from_i64(v);
                if v != 0 {
                    cols[c].push((r, v));
                }
            }
        }
        SparseMatFq { nrows: rows.len(), ncols, field, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn column(&self, j: usize) -> &[(usize, u32)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        coeff(&self.cols[c], r)
    }

    pub fn push_column(&mut self, col: Vec<(usize, u32)>) -> Result<()> {
        if col.iter().any(|e| e.0 >= self.nrows) {
            return Err(Error::CellOutOfRange);
        }
        self.cols.push(normalize(self.field, col));
        self.ncols += 1;
        Ok(())
    }

    /// Rows as sparse vectors over column indices.
    pub fn rows(&self) -> Vec<SparseVec> {
        let mut rows = vec![Vec::new(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                rows[r].push((c, v));
            }
        }
        rows
    }

    pub fn transpose(&self) -> SparseMatFq {
        SparseMatFq { nrows: self.ncols, ncols: self.nrows, field: self.field, cols: self.rows() }
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; self.ncols]; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                out[r][c] = v;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: x.len() });
        }
        let f = self.field;
        let mut out = vec![0; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c] == 0 {
                continue;
            }
            for &(r, v) in col {
                out[r] = f.add(out[r], f.mul(v, x[c]));
            }
        }
        Ok(out)
    }

    pub fn mul_sparse(&self, x: &[(usize, u32)]) -> SparseVec {
        let mut acc = Accumulator::new(self.nrows);
        for &(c, a) in x {
            acc.axpy(self.field, a, &self.cols[c]);
        }
        acc.drain()
    }

    pub fn mul(&self, rhs: &SparseMatFq) -> Result<SparseMatFq> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: rhs.nrows });
        }
        let cols = rhs.cols.iter().map(|c| self.mul_sparse(c)).collect();
        Ok(SparseMatFq { nrows: self.nrows, ncols: rhs.ncols, field: self.field, cols })
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &SparseMatFq) -> Result<SparseMatFq> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: other.ncols });
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|&(r, v)| (r + self.nrows, v)));
                c
            })
            .collect();
        Ok(SparseMatFq { nrows: self.nrows + other.nrows, ncols: self.ncols, field: self.field, cols })
    }
}

/// Add-only elimination front: tracks the rank of a growing column set.
#[derive(Clone, Debug)]
pub struct ColumnReducer {
    field: PrimeField,
    pivots: Vec<Option<SparseVec>>,
    rank: usize,
}

impl ColumnReducer {
    pub fn new(nrows: usize, field: PrimeField) -> Self {
        ColumnReducer { field, pivots: vec![None; nrows], rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Appends a column and returns the rank increase (0 or 1).
    pub fn rank_delta_on_column_add(&mut self, col: &[(usize, u32)]) -> usize {
        let f = self.field;
        let mut v: SparseVec = col.to_vec();
        while let Some(&(lead, a)) = v.first() {
            match &self.pivots[lead] {
                Some(p) => v = axpy(f, &v, f.neg(a), p),
                None => {
                    let s = f.inv(a);
                    scale(f, &mut v, s);
                    self.pivots[lead] = Some(v);
                    self.rank += 1;
                    return 1;
                }
            }
        }
        0
    }
}

pub fn rank(a: &SparseMatFq) -> usize {
    let mut red = ColumnReducer::new(a.nrows, a.field);
    for c in &a.cols {
        red.rank_delta_on_column_add(c);
    }
    red.rank
}

/// Row space kept in fully reduced echelon form: every row has a 1 at its
/// pivot and zeros at all other pivots.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    row_of: Vec<usize>,
    acc: Accumulator,
}

impl Echelon {
    pub fn new(ncols: usize, field: PrimeField) -> Self {
        Echelon { field, rows: Vec::new(), pivots: Vec::new(), row_of: vec![NONE; ncols], acc: Accumulator::new(ncols) }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.row_of[col] != NONE
    }

    /// `v` minus its projection along the pivot columns.
    pub fn reduce(&mut self, v: &[(usize, u32)]) -> SparseVec {
        let f = self.field;
        for &(c, a) in v {
            self.acc.add(f, c, a);
        }
        for &(c, a) in v {
            let r = self.row_of[c];
            if r != NONE {
                self.acc.axpy(f, f.neg(a), &self.rows[r]);
            }
        }
        self.acc.drain()
    }

    pub fn contains(&mut self, v: &[(usize, u32)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds a vector; returns whether the rank grew.
    pub fn insert(&mut self, v: &[(usize, u32)]) -> bool {
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(&(p, a)) = w.first() else {
            return false;
        };
        scale(f, &mut w, f.inv(a));
        for row in self.rows.iter_mut() {
            let c = coeff(row, p);
            if c != 0 {
                *row = axpy(f, row, f.neg(c), &w);
            }
        }
        self.row_of[p] = self.rows.len();
        self.pivots.push(p);
        self.rows.push(w);
        true
    }
}

/// Canonical basis of the null space: one vector per non-pivot column `j`,
/// equal to 1 at `j`, 0 at every other non-pivot column.
pub fn kernel_basis(a: &SparseMatFq) -> Vec<SparseVec> {
    kernel_basis_from_rows(&a.rows(), a.ncols, a.field)
}

/// [`kernel_basis`] for a matrix given by its sorted sparse rows.
pub fn kernel_basis_from_rows(rows: &[SparseVec], ncols: usize, f: PrimeField) -> Vec<SparseVec> {
    let mut ech = Echelon::new(ncols, f);
    for row in rows {
        ech.insert(row);
    }
    let mut basis: Vec<SparseVec> = vec![Vec::new(); ncols];
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        for &(c, v) in row {
            if c != p {
                basis[c].push((p, f.neg(v)));
            }
        }
    }
    let mut out = Vec::new();
    for (j, mut v) in basis.into_iter().enumerate() {
        if ech.is_pivot(j) {
            continue;
        }
        v.push((j, 1));
        v.sort_unstable_by_key(|e| e.0);
        out.push(v);
    }
    out
}

/// Some `x` with `A x = b` (free variables zero), or `None`.
pub fn solve(a: &SparseMatFq, b: &[u32]) -> Result<Option<Vec<u32>>> {
    if b.len() != a.nrows {
        return Err(Error::DimensionMismatch { expected: a.nrows, found: b.len() });
    }
    Ok(solve_sparse(a, &from_dense(b)).map(|x| to_dense(&x, a.ncols)))
}

pub fn solve_sparse(a: &SparseMatFq, b: &[(usize, u32)]) -> Option<SparseVec> {
    let f = a.field;
    let n = a.ncols;
    let mut rows = a.rows();
    for &(r, v) in b {
        rows[r].push((n, v));
    }
    let mut ech = Echelon::new(n + 1, f);
    for row in &rows {
        ech.insert(row);
    }
    if ech.is_pivot(n) {
        return None;
    }
    let mut x = Vec::new();
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        let v = coeff(row, n);
        if v != 0 {
            x.push((p, v));
        }
    }
    x.sort_unstable_by_key(|e| e.0);
    Some(x)
}
