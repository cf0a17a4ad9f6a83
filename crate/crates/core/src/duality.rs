//! Parameter duality `p ↔ p*` and exhaustive checks of the duality of the
//! balanced measure on small tori.
//!
//! With `c` from [`eta_offset_constant`] and `F` the set of i-cells,
//! `w~(p*, d-i)(P•) = K · w~(p, i)(P)` for every configuration, where
//! `K = q^{c - C(d,i)/2 + C(d,d-i-1)} (p*/(1-p))^{|F|}`. Summing gives the same
//! relation between the balanced partition functions.

use alloc::vec::Vec;

use crate::cubical::Complex;
use crate::field::PrimeField;
use crate::homology::eta_offset_constant;
use crate::math::{abs, exp, ln, sqrt};
use crate::rcm::{weight, ConfigStats, ExactDistribution, PlaquetteConfig, RcmParams};
use crate::rng::{uniform, ChainRng};
use crate::stats::total_variation;
use crate::{Error, Result};

/// `p* = (1-p) q / ((1-p) q + p)`.
pub fn dual_p(p: f64, q: f64) -> f64 {
    (1.0 - p) * q / ((1.0 - p) * q + p)
}

/// `β* = ln((e^β + q - 1)/(e^β - 1))`; infinite at `β = 0`.
pub fn dual_beta(beta: f64, q: f64) -> f64 {
    if beta == 0.0 {
        return f64::INFINITY;
    }
    let e = exp(beta);
    ln((e + q - 1.0) / (e - 1.0))
}

/// Self-dual point `sqrt(q)/(1 + sqrt(q))`.
pub fn p_sd(q: f64) -> f64 {
    sqrt(q) / (1.0 + sqrt(q))
}

/// Self-dual coupling `ln(1 + sqrt(q))`.
pub fn beta_sd(q: f64) -> f64 {
    ln(1.0 + sqrt(q))
}

/// `p p* / ((1-p)(1-p*))`, equal to `q` for dual pairs.
pub fn duality_product(p: f64, p_star: f64) -> f64 {
    p * p_star / ((1.0 - p) * (1.0 - p_star))
}

fn check_torus(complex: &Complex, i: usize) -> Result<usize> {
    let d = complex.d();
    if !complex.is_torus() {
        return Err(Error::RequiresTorus);
    }
    if i == 0 || i >= d || complex.max_dim() < d {
        return Err(Error::InvalidParameter("need a full torus and 0 < i < d"));
    }
    Ok(d)
}

/// `ln K` of the termwise identity.
pub fn log_duality_constant(complex: &Complex, i: usize, p: f64, q: f64, field: PrimeField) -> Result<f64> {
    let d = check_torus(complex, i)?;
    let c = eta_offset_constant(complex, i, field)? as f64;
    let expo = c - crate::math::binomial(d, i) as f64 / 2.0 + crate::math::binomial(d, d - i - 1) as f64;
    let f = complex.num_cells(i) as f64;
    Ok(expo * ln(q) + f * (ln(dual_p(p, q)) - ln(1.0 - p)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub p: f64,
    pub p_star: f64,
    pub q: f64,
    pub i: usize,
    pub n_configs: usize,
    /// TV distance between the pushforward and the dual model.
    pub tv: f64,
    /// `ln Z~(p*, d-i)` and `ln Z~(p, i)`.
    pub log_z_dual: f64,
    pub log_z: f64,
    pub log_constant: f64,
    /// `|Z~(p*, d-i) / (K Z~(p, i)) - 1|`.
    pub partition_rel_error: f64,
}

/// Enumerates the balanced `(p, i)` model and the balanced `(p*, d-i)` model
/// and compares the pushforward of the first under dualization with the second.
pub fn verify_duality(complex: &Complex, i: usize, q: f64, p: f64, field: PrimeField) -> Result<DualityReport> {
    verify_duality_at(complex, i, q, p, dual_p(p, q), field)
}

/// [`verify_duality`] against the dual model at an arbitrary `p_star`.
pub fn verify_duality_at(complex: &Complex, i: usize, q: f64, p: f64, p_star: f64, field: PrimeField) -> Result<DualityReport> {
    let d = check_torus(complex, i)?;
    let params = RcmParams::new(p, q, i)?.with_field(field).with_balanced(true);
    let dual_params = RcmParams::new(p_star, q, d - i)?.with_field(field).with_balanced(true);
    let primal = ExactDistribution::from_stats(ConfigStats::enumerate(complex, i, field)?, params);
    let dual = if d - i == i {
        ExactDistribution::from_stats(primal.stats.clone(), dual_params)
    } else {
        ExactDistribution::from_stats(ConfigStats::enumerate(complex, d - i, field)?, dual_params)
    };
    let mut pushed = alloc::vec![0.0; dual.probs.len()];
    for (k, &pr) in primal.probs.iter().enumerate() {
        let image = complex.dual_complex(i, &primal.stats.config(k))?;
        let j = dual.stats.index_of(&image).ok_or(Error::InvalidParameter("dual configuration out of range"))?;
        pushed[j] += pr;
    }
    let tv = total_variation(&pushed, &dual.probs);
    let log_z = primal.log_z_balanced.expect("torus");
    let log_z_dual = dual.log_z_balanced.expect("torus");
    let log_constant = log_duality_constant(complex, i, p, q, field)?;
    let partition_rel_error = abs(exp(log_z_dual - log_constant - log_z) - 1.0);
    Ok(DualityReport { p, p_star, q, i, n_configs: primal.probs.len(), tv, log_z_dual, log_z, log_constant, partition_rel_error })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermwiseReport {
    pub n_configs: usize,
    pub log_constant: f64,
    /// Largest `|ln w~•(P•) - ln w~(P) - ln K|` over the sampled configurations.
    pub max_deviation: f64,
}

/// Checks the termwise weight identity on sampled configurations. Each sample
/// draws a density `u ~ U(0,1)` and then opens plaquettes independently with
/// probability `u`, so `η` covers its full range.
pub fn termwise_duality_check(
    complex: &Complex,
    i: usize,
    q: f64,
    p: f64,
    field: PrimeField,
    n_configs: usize,
    rng: &mut ChainRng,
) -> Result<TermwiseReport> {
    let d = check_torus(complex, i)?;
    let params = RcmParams::new(p, q, i)?.with_field(field).with_balanced(true);
    let dual_params = RcmParams::new(dual_p(p, q), q, d - i)?.with_field(field).with_balanced(true);
    let log_constant = log_duality_constant(complex, i, p, q, field)?;
    let mut worst = 0.0f64;
    for _ in 0..n_configs {
        let u = uniform(rng);
        let open: Vec<bool> = (0..complex.num_cells(i)).map(|_| uniform(rng) < u).collect();
        let image = complex.dual_complex(i, &open)?;
        let w = weight(complex, &params, &PlaquetteConfig::from_open(complex, i, open)?)?;
        let wd = weight(complex, &dual_params, &PlaquetteConfig::from_open(complex, d - i, image)?)?;
        worst = worst.max(abs(wd - w - log_constant));
    }
    Ok(TermwiseReport { n_configs, log_constant, max_deviation: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::build_torus;
    use crate::rng::chain_rng;

    #[test]
    fn parameter_examples() {
        assert!((dual_p(0.5, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((dual_beta(1.0, 2.0) - 0.7719).abs() < 1e-4);
        for q in [1.0, 2.0, 3.0, 7.5] {
            assert!((dual_p(p_sd(q), q) - p_sd(q)).abs() < 1e-15);
            assert!((dual_beta(beta_sd(q), q) - beta_sd(q)).abs() < 1e-12);
        }
        assert_eq!(dual_beta(0.0, 2.0), f64::INFINITY);
        let mut rng = chain_rng(1, 0);
        for _ in 0..100 {
            let p = uniform(&mut rng) * 0.98 + 0.01;
            let q = 1.0 + 9.0 * uniform(&mut rng);
            assert!((dual_p(dual_p(p, q), q) - p).abs() < 1e-12);
            assert!((duality_product(p, dual_p(p, q)) - q).abs() < 1e-9 * q);
            let beta = 0.05 + 3.0 * uniform(&mut rng);
            let lhs = 1.0 - exp(-dual_beta(beta, q));
            assert!((lhs - dual_p(1.0 - exp(-beta), q)).abs() < 1e-12);
            assert!(dual_p(p + 0.005, q) < dual_p(p, q));
        }
    }

    #[test]
    fn exhaustive_duality_on_small_torus() {
        let t = build_torus(2, 2, 2).unwrap();
        for q in [1u64, 2, 3] {
            let field = if q == 1 { PrimeField::new(2).unwrap() } else { PrimeField::new(q).unwrap() };
            for p in [0.3, p_sd(q as f64), 0.7] {
                let r = verify_duality(&t, 1, q as f64, p, field).unwrap();
                assert_eq!(r.n_configs, 256);
                assert!(r.tv < 1e-12, "{r:?}");
                assert!(r.partition_rel_error < 1e-10, "{r:?}");
            }
        }
    }

    #[test]
    fn off_dual_point_fails() {
        let t = build_torus(2, 2, 2).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        let r = verify_duality_at(&t, 1, 2.0, 0.3, dual_p(0.3, 2.0) * 0.99, f2).unwrap();
        assert!(r.tv > 1e-6 && r.partition_rel_error > 1e-6, "{r:?}");
    }

    #[test]
    fn termwise_identity_in_four_dimensions() {
        let t = build_torus(4, 2, 4).unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let mut rng = chain_rng(2, 0);
        let r = termwise_duality_check(&t, 2, 3.0, p_sd(3.0), f3, 30, &mut rng).unwrap();
        assert!(r.max_deviation < 1e-9, "{r:?}");
        let r = termwise_duality_check(&t, 1, 3.0, 0.4, f3, 10, &mut rng).unwrap();
        assert!(r.max_deviation < 1e-9, "{r:?}");
    }
}
