//! Systematic-scan heat-bath dynamics and its exact transition kernels.

use alloc::vec;
use alloc::vec::Vec;

use super::backend::{Backend, LinearBackend};
use super::{ConfigStats, ExactDistribution, RcmParams};
use crate::cubical::Complex;
use crate::rng::{uniform, ChainRng};
use crate::{Error, Result};

/// Open probability given whether the plaquette's presence lowers `betti_{i-1}`.
#[inline]
pub fn open_probability(p: f64, q: f64, kills: bool) -> f64 {
    if kills {
        let a = p / q;
        a / (1.0 - p + a)
    } else {
        p
    }
}

#[derive(Clone, Debug)]
pub struct Glauber<B: Backend> {
    backend: B,
    p: Vec<f64>,
    q: f64,
    order: Vec<usize>,
    rng: ChainRng,
}

impl<B: Backend> Glauber<B> {
    /// Frozen plaquettes are never updated.
    pub fn new(backend: B, p: f64, q: f64, frozen: &[bool], rng: ChainRng) -> Self {
        let n = backend.open_mask().len();
        let order = (0..n).filter(|&c| !frozen[c]).collect();
        Glauber { backend, p: vec![p; n], q, order, rng }
    }

    /// Per-plaquette edge weight, for tilted measures.
    pub fn set_p(&mut self, cell: usize, p: f64) {
        self.p[cell] = p;
    }

    pub fn p(&self, cell: usize) -> f64 {
        self.p[cell]
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn update(&mut self, cell: usize) {
        let p = self.p[cell];
        let prob = if self.q == 1.0 { p } else { open_probability(p, self.q, self.backend.kills_cycle(cell)) };
        let u = uniform(&mut self.rng);
        self.backend.set_open(cell, u < prob);
    }

    pub fn sweep(&mut self) {
        for k in 0..self.order.len() {
            self.update(self.order[k]);
        }
    }

    /// Updates only the given (free) plaquettes, in order.
    pub fn sweep_cells(&mut self, cells: &[usize]) {
        for &c in cells {
            self.update(c);
        }
    }

    pub fn config(&self) -> &[bool] {
        self.backend.open_mask()
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn backend_mut(&mut self) -> &mut B {
        &mut self.backend
    }

    pub fn free_cells(&self) -> &[usize] {
        &self.order
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }
}

/// Row-stochastic matrix over enumerated configurations, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Kernel {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            data[k * n + k] = 1.0;
        }
        Kernel { n, data }
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn then(&self, next: &Kernel) -> Kernel {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * next.data[k * n + c];
                }
            }
        }
        Kernel { n, data }
    }

    /// `max_j |(π K)_j - π_j|`.
    pub fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        let n = self.n;
        (0..n)
            .map(|c| {
                let s: f64 = (0..n).map(|r| pi[r] * self.data[r * n + c]).sum();
                crate::math::abs(s - pi[c])
            })
            .fold(0.0, f64::max)
    }

    /// `max_{x,y} |π_x K(x,y) - π_y K(y,x)|`.
    pub fn detailed_balance_residual(&self, pi: &[f64]) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max(crate::math::abs(pi[r] * self.at(r, c) - pi[c] * self.at(c, r)));
            }
        }
        worst
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.n)
            .map(|r| crate::math::abs(self.data[r * self.n..(r + 1) * self.n].iter().sum::<f64>() - 1.0))
            .fold(0.0, f64::max)
    }
}

/// Exact single-site heat-bath kernels and the systematic-sweep kernel,
/// built from the dynamic Betti-delta backend on each enumerated state.
pub fn exact_kernels(complex: &Complex, params: &RcmParams) -> Result<(ExactDistribution, Vec<Kernel>, Kernel)> {
    params.validate(complex)?;
    if params.balanced {
        return Err(Error::Unsupported("heat-bath dynamics of the balanced measure"));
    }
    let stats = ConfigStats::enumerate(complex, params.i, params.field)?;
    let n = stats.len();
    let mut site = Vec::new();
    for (bit, &cell) in stats.free.iter().enumerate() {
        let mut k = Kernel { n, data: vec![0.0; n * n] };
        for s in 0..n {
            let mut b = LinearBackend::new(complex, params.i, params.field, &stats.config(s));
            let p = open_probability(params.p, params.q, b.kills_cycle(cell));
            let (on, off) = (s | 1 << bit, s & !(1 << bit));
            k.data[s * n + on] += p;
            k.data[s * n + off] += 1.0 - p;
        }
        site.push(k);
    }
    let sweep = site.iter().fold(Kernel::identity(n), |acc, k| acc.then(k));
    Ok((ExactDistribution::from_stats(stats, *params), site, sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_grid, build_torus, Boundary};
    use crate::rcm::backend::AnyBackend;
    use crate::rcm::{exact_distribution, BackendKind};
    use crate::rng::chain_rng;

    #[test]
    fn sweep_kernel_is_stationary_and_sites_reversible() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        for (p, q) in [(0.3, 2.0), (0.6, 3.0), (0.5, 1.7)] {
            let params = RcmParams::new(p, q, 1).unwrap();
            let (ex, site, sweep) = exact_kernels(&g, &params).unwrap();
            assert!(sweep.max_row_sum_error() < 1e-12);
            assert!(sweep.stationarity_residual(&ex.probs) < 1e-10);
            for k in &site {
                assert!(k.detailed_balance_residual(&ex.probs) < 1e-10);
            }
        }
        let t = build_torus(2, 2, 2).unwrap();
        let params = RcmParams::new(0.4, 2.0, 1).unwrap();
        let (ex, site, sweep) = exact_kernels(&t, &params).unwrap();
        assert!(sweep.stationarity_residual(&ex.probs) < 1e-10);
        assert!(site.iter().all(|k| k.detailed_balance_residual(&ex.probs) < 1e-10));
    }

    #[test]
    fn q_one_single_sweep_is_bernoulli() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        let params = RcmParams::new(0.3, 1.0, 1).unwrap();
        let (ex, _, sweep) = exact_kernels(&g, &params).unwrap();
        for r in 0..sweep.n {
            for c in 0..sweep.n {
                assert!((sweep.at(r, c) - ex.probs[c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn empirical_marginal_matches_enumeration() {
        let t = build_torus(2, 2, 2).unwrap();
        let params = RcmParams::new(0.4, 2.0, 1).unwrap();
        let exact = exact_distribution(&t, &params).unwrap().marginal(0);
        let backend = AnyBackend::new(&t, 1, params.field, &[false; 8], BackendKind::Linear);
        let mut chain = Glauber::new(backend, 0.4, 2.0, &[false; 8], chain_rng(5, 0));
        for _ in 0..100 {
            chain.sweep();
        }
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                chain.sweep();
                chain.config()[0] as u8 as f64
            })
            .collect();
        let est = crate::stats::batch_means(&xs, 50);
        assert!((est.mean - exact).abs() < 3.0 * est.stderr, "{est:?} vs {exact}");
    }
}
