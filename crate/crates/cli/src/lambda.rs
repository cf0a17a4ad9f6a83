//! Stochastic bisection for `λ(N)`, the `p` at which `μ(A) = 1/2`.

use rayon::prelude::*;

use plaquette_core::cubical::Complex;
use plaquette_core::rcm::events::Event;
use plaquette_core::rcm::{estimate_event, ChainSettings, RcmParams, SamplerKind};
use plaquette_core::rng::chain_rng;
use plaquette_core::stats::Estimate;

use crate::output::{fmt_f64, Table};
use crate::run::chain_settings;
use crate::{pool_chains, rcm_params, sampler_kind, CliError, Config};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectSettings {
    pub lo: f64,
    pub hi: f64,
    pub target: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    /// Per-chain sample cap when the interval at a midpoint covers the target.
    pub max_samples: usize,
    pub z: f64,
    pub n_chains: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaResult {
    pub n: usize,
    pub lambda: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: usize,
    /// Samples drawn over all chains and midpoints.
    pub n_samples: usize,
    pub converged: bool,
    /// Every `(p, μ̂(A))` evaluated.
    pub points: Vec<(f64, Estimate)>,
}

/// Pooled `μ̂(A)` at `p`; chain `k` always uses stream `k`.
fn estimate_a(
    complex: &Complex,
    params: &RcmParams,
    kind: SamplerKind,
    chain: &ChainSettings,
    b: &BisectSettings,
) -> Result<Estimate, CliError> {
    let per: Vec<Result<Estimate, CliError>> = (0..b.n_chains)
        .into_par_iter()
        .map(|k| Ok(estimate_event(complex, params, &Event::A, chain, kind, chain_rng(b.seed, k as u64))?))
        .collect();
    Ok(pool_chains(&per.into_iter().collect::<Result<Vec<_>, _>>()?))
}

/// Halves `[lo, hi]` while the interval for `μ̂(A)` at the midpoint excludes
/// the target, doubling the sample size at ambiguous midpoints up to
/// `max_samples`. The point estimate is the root of a weighted linear fit
/// through the evaluated points, clamped to the final bracket.
pub fn bisect(
    complex: &Complex,
    base: &RcmParams,
    kind: SamplerKind,
    chain: &ChainSettings,
    b: &BisectSettings,
) -> Result<LambdaResult, CliError> {
    if !(0.0..=1.0).contains(&b.lo) || !(b.lo..=1.0).contains(&b.hi) || b.n_chains == 0 || b.tolerance <= 0.0 {
        return Err(CliError::Usage("invalid bisection settings".into()));
    }
    let (mut lo, mut hi) = (b.lo, b.hi);
    let mut points = Vec::new();
    let mut total = 0usize;
    let mut iterations = 0;
    let mut resolution_limited = false;
    while hi - lo > b.tolerance && iterations < b.max_iter {
        let mid = 0.5 * (lo + hi);
        let params = base.with_p(mid);
        let mut settings = *chain;
        let est = loop {
            let e = estimate_a(complex, &params, kind, &settings, b)?;
            total += e.n_samples;
            let (a, c) = e.interval(b.z);
            if c < b.target || a > b.target || settings.n_samples * 2 > b.max_samples {
                break e;
            }
            settings.n_samples *= 2;
        };
        iterations += 1;
        points.push((mid, est));
        let (a, c) = est.interval(b.z);
        if c < b.target {
            lo = mid;
        } else if a > b.target {
            hi = mid;
        } else {
            resolution_limited = true;
            break;
        }
    }
    let lambda = linear_root(&points, b.target).filter(|x| (lo..=hi).contains(x)).unwrap_or(0.5 * (lo + hi));
    Ok(LambdaResult {
        n: complex.torus_size().unwrap_or(0),
        lambda,
        ci_low: lo,
        ci_high: hi,
        iterations,
        n_samples: total,
        converged: hi - lo <= b.tolerance || resolution_limited,
        points,
    })
}

/// Root of the inverse-variance weighted least-squares line through the points
/// with `0 < μ̂ < 1`.
fn linear_root(points: &[(f64, Estimate)], target: f64) -> Option<f64> {
    let usable: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|(_, e)| e.mean > 0.0 && e.mean < 1.0 && e.stderr > 0.0)
        .map(|&(p, e)| (p, e.mean, 1.0 / (e.stderr * e.stderr)))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let sw: f64 = usable.iter().map(|u| u.2).sum();
    let mx = usable.iter().map(|u| u.0 * u.2).sum::<f64>() / sw;
    let my = usable.iter().map(|u| u.1 * u.2).sum::<f64>() / sw;
    let sxx: f64 = usable.iter().map(|u| u.2 * (u.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|u| u.2 * (u.0 - mx) * (u.1 - my)).sum();
    if sxx <= 0.0 || sxy <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(mx + (target - my) / slope)
}

pub fn bisect_settings(config: &Config) -> BisectSettings {
    let r = &config.run;
    BisectSettings {
        lo: r.p_min,
        hi: r.p_max,
        target: r.target,
        tolerance: r.tolerance,
        max_iter: r.max_iter,
        max_samples: r.max_samples,
        z: r.z,
        n_chains: r.n_chains,
        seed: r.seed,
    }
}

/// One row per torus size.
pub fn lambda(config: &Config) -> Result<(Table, Vec<LambdaResult>), CliError> {
    let r = &config.run;
    if r.geometry != "torus" {
        return Err(CliError::Usage("lambda needs geometry = torus".into()));
    }
    let sizes = if r.sizes.is_empty() { vec![r.n] } else { r.sizes.clone() };
    let base = rcm_params(config, r.p_min)?;
    let kind = sampler_kind(&r.sampler)?;
    let chain = chain_settings(config);
    let b = bisect_settings(config);
    let mut table = Table::new(&["N", "lambda", "ci_low", "ci_high", "iterations", "n_samples", "converged"]);
    let mut results = Vec::new();
    for &n in &sizes {
        let complex = plaquette_core::cubical::build_torus(r.d, n, r.d)?;
        let res = bisect(&complex, &base, kind, &chain, &b)?;
        table.push(vec![
            n.to_string(),
            fmt_f64(res.lambda),
            fmt_f64(res.ci_low),
            fmt_f64(res.ci_high),
            res.iterations.to_string(),
            res.n_samples.to_string(),
            res.converged.to_string(),
        ]);
        results.push(res);
    }
    Ok((table, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_root() {
        let e = |m| Estimate { mean: m, stderr: 0.01, n_samples: 1 };
        let pts = [(0.4, e(0.2)), (0.5, e(0.4)), (0.6, e(0.6))];
        assert!((linear_root(&pts, 0.5).unwrap() - 0.55).abs() < 1e-12);
        assert_eq!(linear_root(&pts[..1], 0.5), None);
    }

    #[test]
    fn bernoulli_bond_percolation_is_self_dual() {
        let t = plaquette_core::cubical::build_torus(2, 6, 2).unwrap();
        let base = RcmParams::new(0.5, 1.0, 1).unwrap();
        let chain = ChainSettings { burn_in: 0, thinning: 1, n_samples: 2000, n_batches: 20 };
        let b = BisectSettings {
            lo: 0.3,
            hi: 0.7,
            target: 0.5,
            tolerance: 0.02,
            max_iter: 10,
            max_samples: 8000,
            z: 3.0,
            n_chains: 2,
            seed: 5,
        };
        let r = bisect(&t, &base, SamplerKind::Auto, &chain, &b).unwrap();
        assert!(r.converged);
        assert!(r.ci_low <= r.lambda && r.lambda <= r.ci_high);
        // A is an up-set, and the torus finite-size shift pulls λ below 1/2.
        assert!(r.lambda > 0.35 && r.lambda < 0.55, "{r:?}");
    }
}
