//! Span of labelled vectors under insertions and deletions.
//!
//! Rows are kept fully reduced (1 at their pivot, 0 at every other pivot) and
//! carry the combination of labelled inputs that produced them. Dependencies
//! among the inputs are kept as a basis of relations. A deletion either
//! consumes a relation (rank unchanged) or a row (rank drops by one), so no
//! recomputation from scratch is needed.

use alloc::vec;
use alloc::vec::Vec;

use super::{axpy, coeff, scale, Accumulator, SparseVec, NONE};
use crate::field::PrimeField;

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    prov: SparseVec,
    pivot: usize,
}

#[derive(Clone, Debug)]
pub struct IncrementalSpan {
    field: PrimeField,
    rows: Vec<Row>,
    row_of: Vec<usize>,
    relations: Vec<SparseVec>,
    acc: Accumulator,
    pacc: Accumulator,
}

impl IncrementalSpan {
    /// `dim` is the ambient dimension, `labels` the number of possible inputs.
    pub fn new(field: PrimeField, dim: usize, labels: usize) -> Self {
        IncrementalSpan {
            field,
            rows: Vec::new(),
            row_of: vec![NONE; dim],
            relations: Vec::new(),
            acc: Accumulator::new(dim),
            pacc: Accumulator::new(labels),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the space of relations among the inserted vectors.
    pub fn nullity(&self) -> usize {
        self.relations.len()
    }

    pub fn relations(&self) -> &[SparseVec] {
        &self.relations
    }

    pub fn clear(&mut self) {
        for r in &self.rows {
            self.row_of[r.pivot] = NONE;
        }
        self.rows.clear();
        self.relations.clear();
    }

    pub fn contains(&mut self, v: &[(usize, u32)]) -> bool {
        let f = self.field;
        for &(c, a) in v {
            self.acc.add(f, c, a);
        }
        for &(c, a) in v {
            let r = self.row_of[c];
            if r != NONE {
                self.acc.axpy(f, f.neg(a), &self.rows[r].vec);
            }
        }
        self.acc.drain().is_empty()
    }

    /// Whether the inserted vector `label` lies in the span of the others.
    pub fn is_redundant(&self, label: usize) -> bool {
        self.relations.iter().any(|z| coeff(z, label) != 0)
    }

    /// Inserts `v` under `label`; returns the rank increase (0 or 1).
    pub fn insert(&mut self, label: usize, v: &[(usize, u32)]) -> usize {
        let f = self.field;
        for &(c, a) in v {
            self.acc.add(f, c, a);
        }
        self.pacc.add(f, label, 1);
        for &(c, a) in v {
            let r = self.row_of[c];
            if r != NONE {
                let na = f.neg(a);
                self.acc.axpy(f, na, &self.rows[r].vec);
                self.pacc.axpy(f, na, &self.rows[r].prov);
            }
        }
        let mut w = self.acc.drain();
        let mut prov = self.pacc.drain();
        let Some(&(p, a)) = w.first() else {
            self.relations.push(prov);
            return 0;
        };
        let s = f.inv(a);
        scale(f, &mut w, s);
        scale(f, &mut prov, s);
        for row in self.rows.iter_mut() {
            let c = coeff(&row.vec, p);
            if c != 0 {
                let nc = f.neg(c);
                row.vec = axpy(f, &row.vec, nc, &w);
                row.prov = axpy(f, &row.prov, nc, &prov);
            }
        }
        self.row_of[p] = self.rows.len();
        self.rows.push(Row { vec: w, prov, pivot: p });
        1
    }

    /// Removes the vector inserted under `label`; returns the rank decrease.
    ///
    /// Panics if `label` is not present.
    pub fn remove(&mut self, label: usize) -> usize {
        let f = self.field;
        let pick = self
            .relations
            .iter()
            .enumerate()
            .filter(|(_, z)| coeff(z, label) != 0)
            .min_by_key(|(_, z)| z.len())
            .map(|(k, _)| k);
        if let Some(k) = pick {
            let z = self.relations.swap_remove(k);
            let ia = f.inv(coeff(&z, label));
            for other in self.relations.iter_mut() {
                let c = coeff(other, label);
                if c != 0 {
                    *other = axpy(f, other, f.neg(f.mul(c, ia)), &z);
                }
            }
            for row in self.rows.iter_mut() {
                let c = coeff(&row.prov, label);
                if c != 0 {
                    row.prov = axpy(f, &row.prov, f.neg(f.mul(c, ia)), &z);
                }
            }
            return 0;
        }
        let j = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| coeff(&r.prov, label) != 0)
            .min_by_key(|(_, r)| r.prov.len())
            .map(|(k, _)| k)
            .expect("label not present in span");
        let dropped = self.rows.swap_remove(j);
        self.row_of[dropped.pivot] = NONE;
        if j < self.rows.len() {
            self.row_of[self.rows[j].pivot] = j;
        }
        let ia = f.inv(coeff(&dropped.prov, label));
        for row in self.rows.iter_mut() {
            let c = coeff(&row.prov, label);
            if c != 0 {
                let t = f.neg(f.mul(c, ia));
                row.vec = axpy(f, &row.vec, t, &dropped.vec);
                row.prov = axpy(f, &row.prov, t, &dropped.prov);
            }
        }
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, SparseMatFq};
    use crate::rng::{below, chain_rng};

    fn random_vec(rng: &mut crate::rng::ChainRng, dim: usize, q: u32) -> SparseVec {
        let mut v: Vec<(usize, u32)> = (0..3).map(|_| (below(rng, dim as u32) as usize, 1 + below(rng, q - 1))).collect();
        v.sort_unstable_by_key(|e| e.0);
        v.dedup_by_key(|e| e.0);
        v
    }

    #[test]
    fn duplicate_adds_nothing() {
        let f = PrimeField::new(3).unwrap();
        let mut s = IncrementalSpan::new(f, 4, 4);
        assert_eq!(s.insert(0, &[(1, 1), (2, 2)]), 1);
        assert_eq!(s.insert(1, &[(1, 1), (2, 2)]), 0);
        assert!(s.is_redundant(0) && s.is_redundant(1));
        assert_eq!(s.remove(0), 0);
        assert!(!s.is_redundant(1));
        assert_eq!(s.remove(1), 1);
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn random_insert_remove_matches_recompute() {
        let f = PrimeField::new(3).unwrap();
        let (dim, labels) = (12usize, 20usize);
        let mut rng = chain_rng(11, 0);
        let vecs: Vec<SparseVec> = (0..labels).map(|_| random_vec(&mut rng, dim, 3)).collect();
        for _ in 0..200 {
            let mut s = IncrementalSpan::new(f, dim, labels);
            let mut present = vec![false; labels];
            for _ in 0..40 {
                let l = below(&mut rng, labels as u32) as usize;
                let before = s.rank();
                if present[l] {
                    let d = s.remove(l);
                    assert_eq!(s.rank(), before - d);
                } else {
                    let d = s.insert(l, &vecs[l]);
                    assert_eq!(s.rank(), before + d);
                }
                present[l] = !present[l];
                let cols: Vec<SparseVec> = (0..labels).filter(|&k| present[k]).map(|k| vecs[k].clone()).collect();
                let n = cols.len();
                let m = SparseMatFq::from_columns(dim, f, cols).unwrap();
                assert_eq!(s.rank(), rank(&m));
                assert_eq!(s.nullity(), n - rank(&m));
                for k in 0..labels {
                    if present[k] {
                        let others: Vec<SparseVec> =
                            (0..labels).filter(|&j| present[j] && j != k).map(|j| vecs[j].clone()).collect();
                        let mo = SparseMatFq::from_columns(dim, f, others).unwrap();
                        assert_eq!(s.is_redundant(k), rank(&mo) == rank(&m));
                    } else {
                        let mut mk = m.clone();
                        mk.push_column(vecs[k].clone()).unwrap();
                        assert_eq!(s.contains(&vecs[k]), rank(&mk) == rank(&m));
                    }
                }
            }
        }
    }
}
