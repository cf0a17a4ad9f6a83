//! Enumeration checks of positive association and of monotonicity in `q`.

use alloc::vec::Vec;

use super::{exact_distribution, p_from_p_hat, ConfigStats, ExactDistribution, RcmParams};
use crate::cubical::Complex;
use crate::field::PrimeField;
use crate::rng::{below, chain_rng};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct FkgReport {
    pub lattice_pairs: usize,
    /// `b(ω ∨ ξ) + b(ω ∧ ξ) >= b(ω) + b(ξ)` for every pair, in integers.
    pub betti_supermodular: bool,
    /// Minimum of `ln μ(ω∨ξ) + ln μ(ω∧ξ) - ln μ(ω) - ln μ(ξ)`.
    pub min_lattice_slack: f64,
    pub events_checked: usize,
    /// Minimum of `μ(A ∩ B) - μ(A) μ(B)` over the increasing events tested.
    pub min_association: f64,
    pub passed: bool,
}

/// Lattice condition on every pair of configurations, and positive
/// association of all single-plaquette events and of `sampled` random pairs of
/// principal up-sets `{ω ⊇ ξ}`.
pub fn fkg_probe(complex: &Complex, params: &RcmParams, sampled: usize, seed: u64) -> Result<FkgReport> {
    let ex = exact_distribution(complex, params)?;
    let n = ex.stats.len();
    let lw = ex.stats.log_weights(params);
    let b = &ex.stats.betti_lower;
    let mut supermodular = true;
    let mut slack = f64::INFINITY;
    for x in 0..n {
        for y in x..n {
            let (hi, lo) = (x | y, x & y);
            supermodular &= b[hi] + b[lo] >= b[x] + b[y];
            slack = slack.min(lw[hi] + lw[lo] - lw[x] - lw[y]);
        }
    }
    let up = |xi: usize| ex.expect(|k| (k & xi == xi) as u8 as f64);
    let both = |a: usize, c: usize| ex.expect(|k| (k & a == a && k & c == c) as u8 as f64);
    let mut assoc = f64::INFINITY;
    let mut events = 0;
    let bits = ex.stats.free.len();
    for e in 0..bits {
        for f in e..bits {
            assoc = assoc.min(both(1 << e, 1 << f) - up(1 << e) * up(1 << f));
            events += 1;
        }
    }
    let mut rng = chain_rng(seed, 0);
    for _ in 0..sampled {
        let a = below(&mut rng, n as u32) as usize;
        let c = below(&mut rng, n as u32) as usize;
        assoc = assoc.min(both(a, c) - up(a) * up(c));
        events += 1;
    }
    let passed = supermodular && slack >= -1e-12 && assoc >= -1e-14;
    Ok(FkgReport {
        lattice_pairs: n * (n + 1) / 2,
        betti_supermodular: supermodular,
        min_lattice_slack: slack,
        events_checked: events,
        min_association: assoc,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub qs: Vec<f64>,
    /// `E[η]` at fixed `p`, one row per `p`, ordered as `qs`.
    pub fixed_p: Vec<(f64, Vec<f64>)>,
    /// `E[η]` at fixed `p_hat`.
    pub fixed_p_hat: Vec<(f64, Vec<f64>)>,
    /// `E[η]` non-increasing in `q` at fixed `p`.
    pub decreasing_at_fixed_p: bool,
    /// `E[η]` non-decreasing in `q` at fixed `p_hat`.
    pub increasing_at_fixed_p_hat: bool,
    pub passed: bool,
}

fn mean_eta(stats: &ConfigStats, params: RcmParams) -> f64 {
    ExactDistribution::from_stats(stats.clone(), params).mean_eta()
}

/// Checks that `E[η]` decreases in `q` at fixed `p` and increases in `q` at
/// fixed `p_hat`, over an increasing list of `q >= 1`.
pub fn q_monotonicity_probe(
    complex: &Complex,
    i: usize,
    field: PrimeField,
    ps: &[f64],
    qs: &[f64],
) -> Result<MonotonicityReport> {
    let base = RcmParams::new(0.5, 1.0, i)?.with_field(field);
    base.validate(complex)?;
    let stats = ConfigStats::enumerate(complex, i, field)?;
    let tol = 1e-12;
    let mut fixed_p = Vec::new();
    let mut fixed_p_hat = Vec::new();
    let mut dec = true;
    let mut inc = true;
    for &p in ps {
        let row: Vec<f64> = qs.iter().map(|&q| mean_eta(&stats, RcmParams { p, q, ..base })).collect();
        dec &= row.windows(2).all(|w| w[1] <= w[0] + tol);
        fixed_p.push((p, row));
        // p is the p_hat of the q = 1 model.
        let row: Vec<f64> = qs.iter().map(|&q| mean_eta(&stats, RcmParams { p: p_from_p_hat(p, q), q, ..base })).collect();
        inc &= row.windows(2).all(|w| w[1] + tol >= w[0]);
        fixed_p_hat.push((p, row));
    }
    Ok(MonotonicityReport {
        qs: qs.to_vec(),
        fixed_p,
        fixed_p_hat,
        decreasing_at_fixed_p: dec,
        increasing_at_fixed_p_hat: inc,
        passed: dec && inc,
    })
}
