//! Union-find variants and a bidirectional search used by the fast paths.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::PrimeField;

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

/// Union-find that tracks integer displacements, for detecting loops that
/// wind around a torus.
#[derive(Clone, Debug)]
pub struct WindingUnionFind {
    d: usize,
    parent: Vec<u32>,
    size: Vec<u32>,
    offset: Vec<i32>,
}

impl WindingUnionFind {
    pub fn new(n: usize, d: usize) -> Self {
        WindingUnionFind { d, parent: (0..n as u32).collect(), size: vec![1; n], offset: vec![0; n * d] }
    }

    /// Root of `x`; `out` receives position(x) - position(root).
    pub fn find(&mut self, x: usize, out: &mut [i32]) -> usize {
        out.fill(0);
        let mut path = Vec::new();
        let mut y = x;
        while self.parent[y] as usize != y {
            path.push(y);
            y = self.parent[y] as usize;
        }
        let root = y;
        // Compress from the top so each node's offset becomes relative to the root.
        for &node in path.iter().rev() {
            let p = self.parent[node] as usize;
            if p != root {
                for a in 0..self.d {
                    self.offset[node * self.d + a] += self.offset[p * self.d + a];
                }
                self.parent[node] = root as u32;
            }
        }
        if x != root {
            out.copy_from_slice(&self.offset[x * self.d..(x + 1) * self.d]);
        }
        root
    }

    /// Joins `u` and `v` with `position(v) = position(u) + disp`. If they were
    /// already joined, writes the closing discrepancy into `winding` and returns true.
    pub fn join(&mut self, u: usize, v: usize, disp: &[i32], winding: &mut [i32]) -> bool {
        let d = self.d;
        let mut ou = vec![0; d];
        let mut ov = vec![0; d];
        let ru = self.find(u, &mut ou);
        let rv = self.find(v, &mut ov);
        if ru == rv {
            for a in 0..d {
                winding[a] = ou[a] + disp[a] - ov[a];
            }
            return true;
        }
        // position(rv) - position(ru) = disp + ou - ov
        let delta: Vec<i32> = (0..d).map(|a| disp[a] + ou[a] - ov[a]).collect();
        if self.size[ru] >= self.size[rv] {
            self.parent[rv] = ru as u32;
            self.size[ru] += self.size[rv];
            self.offset[rv * d..(rv + 1) * d].copy_from_slice(&delta);
        } else {
            self.parent[ru] = rv as u32;
            self.size[rv] += self.size[ru];
            for a in 0..d {
                self.offset[ru * d + a] = -delta[a];
            }
        }
        false
    }
}

/// Union-find solving difference constraints `g(u) - g(v) = c` over F_q.
#[derive(Clone, Debug)]
pub struct PotentialUnionFind {
    field: PrimeField,
    parent: Vec<u32>,
    size: Vec<u32>,
    pot: Vec<u32>,
}

impl PotentialUnionFind {
    pub fn new(n: usize, field: PrimeField) -> Self {
        PotentialUnionFind { field, parent: (0..n as u32).collect(), size: vec![1; n], pot: vec![0; n] }
    }

    /// Root of `x` and `g(x) - g(root)`.
    pub fn find(&mut self, x: usize) -> (usize, u32) {
        let f = self.field;
        let mut path = Vec::new();
        let mut y = x;
        while self.parent[y] as usize != y {
            path.push(y);
            y = self.parent[y] as usize;
        }
        let root = y;
        for &node in path.iter().rev() {
            let p = self.parent[node] as usize;
            if p != root {
                self.pot[node] = f.add(self.pot[node], self.pot[p]);
                self.parent[node] = root as u32;
            }
        }
        (root, if x == root { 0 } else { self.pot[x] })
    }

    /// Adds `g(u) - g(v) = c`; returns false if it contradicts earlier constraints.
    pub fn constrain(&mut self, u: usize, v: usize, c: u32) -> bool {
        let f = self.field;
        let (ru, pu) = self.find(u);
        let (rv, pv) = self.find(v);
        if ru == rv {
            return f.sub(pu, pv) == c;
        }
        // g(rv) - g(ru) = pu - pv - c
        let t = f.sub(f.sub(pu, pv), c);
        if self.size[ru] >= self.size[rv] {
            self.parent[rv] = ru as u32;
            self.size[ru] += self.size[rv];
            self.pot[rv] = t;
        } else {
            self.parent[ru] = rv as u32;
            self.size[rv] += self.size[ru];
            self.pot[ru] = f.neg(t);
        }
        true
    }
}

/// Neighbour enumeration for [`Search`]; edges are identified by an id so a
/// single edge can be excluded.
pub trait Adjacency {
    fn for_each_neighbor(&self, node: usize, excluded: usize, f: &mut dyn FnMut(usize));
}

/// Bidirectional breadth-first search with reusable marks.
#[derive(Clone, Debug)]
pub struct Search {
    stamp: Vec<u32>,
    side: Vec<u8>,
    epoch: u32,
    qa: Vec<usize>,
    qb: Vec<usize>,
}

impl Search {
    pub fn new(n: usize) -> Self {
        Search { stamp: vec![0; n], side: vec![0; n], epoch: 0, qa: Vec::new(), qb: Vec::new() }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// Whether `s` and `t` are joined without using edge `excluded`.
    pub fn connected<A: Adjacency>(&mut self, adj: &A, s: usize, t: usize, excluded: usize) -> bool {
        if s == t {
            return true;
        }
        self.next_epoch();
        let e = self.epoch;
        self.qa.clear();
        self.qb.clear();
        self.stamp[s] = e;
        self.side[s] = 0;
        self.stamp[t] = e;
        self.side[t] = 1;
        self.qa.push(s);
        self.qb.push(t);
        let (mut ha, mut hb) = (0, 0);
        loop {
            let a_left = self.qa.len() - ha;
            let b_left = self.qb.len() - hb;
            if a_left == 0 || b_left == 0 {
                return false;
            }
            let from_a = a_left <= b_left;
            let node = if from_a {
                ha += 1;
                self.qa[ha - 1]
            } else {
                hb += 1;
                self.qb[hb - 1]
            };
            let my = if from_a { 0 } else { 1 };
            let mut met = false;
            let stamp = &mut self.stamp;
            let side = &mut self.side;
            let queue = if from_a { &mut self.qa } else { &mut self.qb };
            adj.for_each_neighbor(node, excluded, &mut |m| {
                if met {
                    return;
                }
                if stamp[m] == e {
                    if side[m] != my {
                        met = true;
                    }
                } else {
                    stamp[m] = e;
                    side[m] = my;
                    queue.push(m);
                }
            });
            if met {
                return true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Lines(Vec<(usize, usize)>);

    impl Adjacency for Lines {
        fn for_each_neighbor(&self, node: usize, excluded: usize, f: &mut dyn FnMut(usize)) {
            for (k, &(a, b)) in self.0.iter().enumerate() {
                if k == excluded {
                    continue;
                }
                if a == node {
                    f(b);
                } else if b == node {
                    f(a);
                }
            }
        }
    }

    #[test]
    fn search_respects_exclusion() {
        let g = Lines(vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5)]);
        let mut s = Search::new(6);
        assert!(s.connected(&g, 0, 2, usize::MAX));
        assert!(s.connected(&g, 0, 1, 0));
        assert!(!s.connected(&g, 0, 4, usize::MAX));
        let path = Lines(vec![(0, 1), (1, 2)]);
        assert!(!s.connected(&path, 0, 2, 1));
    }

    #[test]
    fn winding_detects_wraparound() {
        // A cycle of three vertices on a ring of length 3.
        let mut w = WindingUnionFind::new(3, 1);
        let mut wind = [0];
        assert!(!w.join(0, 1, &[1], &mut wind));
        assert!(!w.join(1, 2, &[1], &mut wind));
        assert!(w.join(2, 0, &[1], &mut wind));
        assert_eq!(wind, [3]);
        let mut w = WindingUnionFind::new(3, 1);
        w.join(0, 1, &[1], &mut wind);
        w.join(1, 2, &[1], &mut wind);
        assert!(w.join(0, 2, &[2], &mut wind));
        assert_eq!(wind, [0]);
    }

    #[test]
    fn potentials_detect_contradiction() {
        let f = PrimeField::new(3).unwrap();
        let mut p = PotentialUnionFind::new(4, f);
        assert!(p.constrain(0, 1, 1));
        assert!(p.constrain(1, 2, 1));
        assert!(p.constrain(0, 2, 2));
        assert!(!p.constrain(2, 0, 2));
        assert!(p.constrain(3, 0, 0));
        let mut u = UnionFind::new(3);
        assert!(u.union(0, 1));
        assert!(!u.union(1, 0));
    }
}
