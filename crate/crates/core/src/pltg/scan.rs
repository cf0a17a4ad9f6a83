//! Area/perimeter scans of square loops on boxes: Wilson loop estimates from
//! the gauge chain next to independent estimates of `μ(V_γ)`.

use alloc::vec::Vec;

use super::loops::{wilson_expectation, LoopSpec, SpinSampler};
use super::{beta_from_p, bond_probability};
use crate::cubical::{build_box, Boundary};
use crate::field::PrimeField;
use crate::rcm::rare::{estimate_v, RareEstimate, RareMethod, RareSettings};
use crate::rcm::{ChainSettings, RcmParams};
use crate::rng::chain_rng;
use crate::stats::Estimate;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSettings {
    pub wilson: ChainSettings,
    pub sampler: SpinSampler,
    /// Skip the gauge chain and report only `μ(V_γ)`.
    pub skip_wilson: bool,
    pub rare: RareSettings,
    pub method: RareMethod,
    /// Distance from the loop's filling to the box boundary; defaults to the side length.
    pub margin: Option<usize>,
    pub boundary: Boundary,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            wilson: ChainSettings { burn_in: 200, thinning: 1, n_samples: 1000, n_batches: 20 },
            sampler: SpinSampler::HeatBath,
            skip_wilson: false,
            rare: RareSettings::default(),
            method: RareMethod::Auto,
            margin: None,
            boundary: Boundary::Free,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub beta: f64,
    pub p: f64,
    pub q: u32,
    pub i: usize,
    pub d: usize,
    /// Half-width of the box `[-n, n]^d`.
    pub box_half_width: usize,
    pub dims: Vec<usize>,
    pub perimeter: usize,
    pub area: usize,
    pub re_w: Option<Estimate>,
    pub im_w: Option<Estimate>,
    pub v: RareEstimate,
    pub seed: u64,
}

impl ScanRow {
    /// `-ln μ̂(V) / Area`.
    pub fn area_rate(&self) -> f64 {
        -self.v.log_mean / self.area as f64
    }

    /// `-ln μ̂(V) / Per`.
    pub fn perimeter_rate(&self) -> f64 {
        -self.v.log_mean / self.perimeter as f64
    }
}

/// Either `betas` or `ps` parametrizes the scan; the other is derived.
#[derive(Clone, Debug, PartialEq)]
pub enum Coupling {
    Beta(Vec<f64>),
    P(Vec<f64>),
}

impl Coupling {
    fn pairs(&self) -> Vec<(f64, f64)> {
        match self {
            Coupling::Beta(b) => b.iter().map(|&b| (b, bond_probability(b))).collect(),
            Coupling::P(p) => p.iter().map(|&p| (beta_from_p(p), p)).collect(),
        }
    }
}

/// One row per (coupling, side length), each on the smallest centered box that
/// keeps the requested margin.
pub fn area_perimeter_scan(
    d: usize,
    i: usize,
    field: PrimeField,
    coupling: &Coupling,
    sizes: &[usize],
    settings: &ScanSettings,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    if i == 0 || i >= d {
        return Err(Error::InvalidParameter("need 0 < i < d"));
    }
    let q = field.modulus();
    let mut rows = Vec::new();
    let mut stream = 0u64;
    for &(beta, p) in &coupling.pairs() {
        for &n in sizes {
            if n == 0 {
                return Err(Error::InvalidParameter("loop sides must be positive"));
            }
            let margin = settings.margin.unwrap_or(n);
            let half = margin + n.div_ceil(2);
            let complex = build_box(d, half, d, settings.boundary)?;
            let spec = LoopSpec::centered_square(d, i, n)?;
            let target = spec.target(&complex, field)?;
            let params = RcmParams::new(p, q as f64, i)?.with_field(field);
            let (re_w, im_w) = if settings.skip_wilson {
                (None, None)
            } else {
                let w = wilson_expectation(
                    &complex,
                    i,
                    field,
                    beta,
                    core::slice::from_ref(&target.gamma),
                    &settings.wilson,
                    settings.sampler,
                    chain_rng(seed, stream),
                )?;
                (Some(w[0].re), Some(w[0].im))
            };
            let v = estimate_v(&complex, &params, &target, settings.method, &settings.rare, chain_rng(seed, stream + 1))?;
            stream += 2;
            rows.push(ScanRow {
                beta,
                p,
                q,
                i,
                d,
                box_half_width: half,
                dims: spec.dims.clone(),
                perimeter: spec.perimeter(&complex, field)?,
                area: spec.area(),
                re_w,
                im_w,
                v,
                seed,
            });
        }
    }
    Ok(rows)
}

/// Constants `ĉ₁ = max -ln μ̂/Area` and `ĉ₂ = min -ln μ̂/Per`, the tightest with
/// `exp(-ĉ₁ Area) <= μ̂ <= exp(-ĉ₂ Per)` on every row; `None` unless both are
/// finite and positive.
pub fn fitted_bounds(rows: &[ScanRow]) -> Option<(f64, f64)> {
    let c1 = rows.iter().map(ScanRow::area_rate).fold(f64::NEG_INFINITY, f64::max);
    let c2 = rows.iter().map(ScanRow::perimeter_rate).fold(f64::INFINITY, f64::min);
    (c1.is_finite() && c2.is_finite() && c1 > 0.0 && c2 > 0.0).then_some((c1, c2))
}

/// `max/min - 1` of positive values.
pub fn relative_spread(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo <= 0.0 {
        return f64::INFINITY;
    }
    hi / lo - 1.0
}

/// Log-rate standard error from the delta method.
pub fn rate_stderr(row: &ScanRow, by_area: bool) -> f64 {
    let scale = if by_area { row.area } else { row.perimeter } as f64;
    row.v.log_stderr / scale
}
