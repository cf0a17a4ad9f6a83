//! Single-spin heat-bath dynamics for the gauge theory. Each update redraws
//! `f(τ)` from its conditional law, which depends only on the cofaces of `τ`.

use alloc::vec;
use alloc::vec::Vec;

use super::{coboundary_value, decode_state, encode_state, exact_gibbs, GibbsTable};
use crate::cubical::Complex;
use crate::field::PrimeField;
use crate::math::exp;
use crate::rcm::glauber::Kernel;
use crate::rng::{uniform, ChainRng};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SpinHeatBath<'a> {
    complex: &'a Complex,
    i: usize,
    field: PrimeField,
    beta: f64,
    spins: Vec<u32>,
    rng: ChainRng,
    weights: Vec<f64>,
}

impl<'a> SpinHeatBath<'a> {
    /// Starts from `f = 0`.
    pub fn new(complex: &'a Complex, i: usize, field: PrimeField, beta: f64, rng: ChainRng) -> Result<Self> {
        if i == 0 || i > complex.max_dim() {
            return Err(Error::InvalidParameter("need 0 < i <= max_dim"));
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidParameter("beta must be non-negative"));
        }
        let q = field.modulus() as usize;
        Ok(SpinHeatBath { complex, i, field, beta, spins: vec![0; complex.num_cells(i - 1)], rng, weights: vec![0.0; q] })
    }

    /// Conditional law of `f(τ)` given the other spins, unnormalized.
    fn conditional(&mut self, tau: usize) {
        let f = self.field;
        let own = self.spins[tau];
        let mut counts = vec![0u32; f.modulus() as usize];
        for &(sigma, s) in self.complex.cofaces(self.i - 1, tau) {
            let total = coboundary_value(self.complex, self.i, f, &self.spins, sigma as usize);
            let rest = if s > 0 { f.sub(total, own) } else { f.add(total, own) };
            // rest + s·a = 0.
            let a = if s > 0 { f.neg(rest) } else { rest };
            counts[a as usize] += 1;
        }
        for (w, &c) in self.weights.iter_mut().zip(&counts) {
            *w = exp(self.beta * c as f64);
        }
    }

    pub fn update(&mut self, tau: usize) {
        self.conditional(tau);
        let total: f64 = self.weights.iter().sum();
        let mut u = uniform(&mut self.rng) * total;
        let mut pick = self.weights.len() - 1;
        for (a, &w) in self.weights.iter().enumerate() {
            if u < w {
                pick = a;
                break;
            }
            u -= w;
        }
        self.spins[tau] = pick as u32;
    }

    pub fn sweep(&mut self) {
        for t in 0..self.spins.len() {
            self.update(t);
        }
    }

    pub fn spins(&self) -> &[u32] {
        &self.spins
    }
}

/// Exact kernel of one systematic sweep, composed from the single-site
/// conditionals used by [`SpinHeatBath`].
pub fn heat_bath_sweep_kernel(complex: &Complex, i: usize, field: PrimeField, beta: f64) -> Result<(GibbsTable, Kernel)> {
    let table = exact_gibbs(complex, i, field, beta)?;
    let states = table.probs.len();
    if states > 4096 {
        return Err(Error::TooLarge { cells: table.n_spins, limit: 4096 });
    }
    let q = field.modulus();
    let mut chain = SpinHeatBath::new(complex, i, field, beta, crate::rng::chain_rng(0, 0))?;
    let mut sweep = Kernel::identity(states);
    for tau in 0..table.n_spins {
        let mut k = Kernel { n: states, data: vec![0.0; states * states] };
        for s in 0..states {
            chain.spins = decode_state(s, table.n_spins, q);
            chain.conditional(tau);
            let total: f64 = chain.weights.iter().sum();
            for a in 0..q {
                let mut g = chain.spins.clone();
                g[tau] = a;
                k.data[s * states + encode_state(&g, q)] += chain.weights[a as usize] / total;
            }
        }
        sweep = sweep.then(&k);
    }
    Ok((table, sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_grid, Boundary};

    #[test]
    fn sweep_kernel_is_stationary() {
        let g = build_grid(&[1, 1], 2, Boundary::Free).unwrap();
        for q in [2u64, 3] {
            let f = PrimeField::new(q).unwrap();
            for (i, beta) in [(1, 0.7), (2, 1.3)] {
                let (table, k) = heat_bath_sweep_kernel(&g, i, f, beta).unwrap();
                assert!(k.max_row_sum_error() < 1e-12);
                assert!(k.stationarity_residual(&table.probs) < 1e-12);
            }
        }
    }
}
