//! The plaquette random-cluster measure
//! `μ(P) ∝ p^η (1-p)^{|X^i|-η} q^{betti_{i-1}(P)}`, optionally balanced by
//! `q^{-b_i(P)/2}` on tori.

use alloc::vec::Vec;

use crate::cubical::Complex;
use crate::field::{is_prime, PrimeField};
use crate::homology::{betti, giant_rank, Subcomplex};
use crate::linalg::IncrementalSpan;
use crate::math::{exp, ln, log_sum_exp, xlny};
use crate::{Error, Result};

pub mod backend;
pub mod estimate;
pub mod events;
pub mod glauber;
pub mod probes;
pub mod rare;

pub use backend::{AnyBackend, Backend, BackendKind, DualGraphBackend, GraphBackend, LinearBackend};
pub use estimate::{estimate_event, estimate_events, ChainSettings, Independent, Sampler, SamplerKind};
pub use events::{CycleTarget, Event, EventEvaluator};
pub use glauber::{open_probability, Glauber};

/// Largest number of free plaquettes accepted by exact enumeration.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcmParams {
    pub p: f64,
    /// Weight exponent, any real `q >= 1`.
    pub q: f64,
    /// Coefficient field used for homology.
    pub field: PrimeField,
    pub i: usize,
    pub balanced: bool,
}

/// `F_q` when `q` is a prime integer, otherwise `F_2`.
pub fn default_field(q: f64) -> PrimeField {
    if libm::trunc(q) == q && q >= 2.0 && q < 2147483648.0 && is_prime(q as u64) {
        PrimeField::new(q as u64).expect("prime")
    } else {
        PrimeField::new(2).expect("prime")
    }
}

impl RcmParams {
    pub fn new(p: f64, q: f64, i: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter("p must lie in [0, 1]"));
        }
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter("q must be a finite real >= 1"));
        }
        if i == 0 {
            return Err(Error::InvalidParameter("plaquette dimension i must be positive"));
        }
        Ok(RcmParams { p, q, field: default_field(q), i, balanced: false })
    }

    pub fn with_field(mut self, field: PrimeField) -> Self {
        self.field = field;
        self
    }

    pub fn with_balanced(mut self, balanced: bool) -> Self {
        self.balanced = balanced;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// Whether the PLTG coupling applies: prime integer `q` matching the field.
    pub fn is_coupled(&self) -> bool {
        self.field.modulus() as f64 == self.q
    }

    pub fn validate(&self, complex: &Complex) -> Result<()> {
        if self.i >= complex.d() || self.i > complex.max_dim() {
            return Err(Error::InvalidParameter("need 0 < i < d and i <= max_dim"));
        }
        if self.balanced && !complex.is_torus() {
            return Err(Error::RequiresTorus);
        }
        Ok(())
    }

    /// Open probability of a plaquette whose presence lowers `betti_{i-1}`.
    pub fn p_hat(&self) -> f64 {
        open_probability(self.p, self.q, true)
    }
}

/// `p` with `(p/q)/(1-p+p/q) = p_hat`.
pub fn p_from_p_hat(p_hat: f64, q: f64) -> f64 {
    p_hat * q / (1.0 + p_hat * (q - 1.0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaquetteConfig {
    open: Vec<bool>,
    frozen: Vec<bool>,
}

impl PlaquetteConfig {
    /// All free plaquettes closed, frozen ones open.
    pub fn closed(complex: &Complex, i: usize) -> Self {
        let frozen = complex.frozen_mask(i);
        PlaquetteConfig { open: frozen.clone(), frozen }
    }

    pub fn from_open(complex: &Complex, i: usize, open: Vec<bool>) -> Result<Self> {
        let frozen = complex.frozen_mask(i);
        if open.len() != frozen.len() {
            return Err(Error::DimensionMismatch { expected: frozen.len(), found: open.len() });
        }
        if open.iter().zip(&frozen).any(|(&o, &f)| f && !o) {
            return Err(Error::InvalidParameter("frozen plaquettes must be open"));
        }
        Ok(PlaquetteConfig { open, frozen })
    }

    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn eta(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    /// Sets a free plaquette; frozen plaquettes are left open.
    pub fn set(&mut self, cell: usize, open: bool) {
        if !self.frozen[cell] {
            self.open[cell] = open;
        }
    }
}

fn log_weight_from(params: &RcmParams, cells: usize, eta: usize, betti_lower: usize, giant: usize) -> f64 {
    let (e, n) = (eta as f64, cells as f64);
    let mut w = xlny(e, params.p) + xlny(n - e, 1.0 - params.p) + betti_lower as f64 * ln(params.q);
    if params.balanced {
        w -= giant as f64 * ln(params.q) / 2.0;
    }
    w
}

/// Unnormalized log-weight of a configuration.
pub fn weight(complex: &Complex, params: &RcmParams, config: &PlaquetteConfig) -> Result<f64> {
    params.validate(complex)?;
    let sub = Subcomplex::plaquettes(complex, params.i, config.open())?;
    let b = betti(&sub, params.i - 1, params.field);
    let g = if params.balanced { giant_rank(&sub, params.i, params.field)? } else { 0 };
    Ok(log_weight_from(params, config.open.len(), config.eta(), b, g))
}

/// Per-configuration statistics of every configuration of the free plaquettes.
#[derive(Clone, Debug)]
pub struct ConfigStats {
    pub cells: usize,
    pub free: Vec<usize>,
    pub frozen: Vec<bool>,
    pub eta: Vec<u32>,
    pub betti_lower: Vec<u32>,
    /// Giant rank `b_i`, on tori only.
    pub giant: Option<Vec<u32>>,
}

impl ConfigStats {
    pub fn enumerate(complex: &Complex, i: usize, field: PrimeField) -> Result<Self> {
        let frozen = complex.frozen_mask(i);
        let free: Vec<usize> = (0..frozen.len()).filter(|&c| !frozen[c]).collect();
        if free.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge { cells: free.len(), limit: ENUMERATION_LIMIT });
        }
        let total = 1usize << free.len();
        let mut eta = Vec::with_capacity(total);
        let mut betti_lower = Vec::with_capacity(total);
        let mut giant = complex.is_torus().then(|| Vec::with_capacity(total));
        let mut open = frozen.clone();
        for mask in 0..total {
            for (b, &c) in free.iter().enumerate() {
                open[c] = mask >> b & 1 == 1;
            }
            let sub = Subcomplex::plaquettes(complex, i, &open)?;
            eta.push(open.iter().filter(|&&x| x).count() as u32);
            betti_lower.push(betti(&sub, i - 1, field) as u32);
            if let Some(g) = giant.as_mut() {
                g.push(giant_rank(&sub, i, field)? as u32);
            }
        }
        Ok(ConfigStats { cells: frozen.len(), free, frozen, eta, betti_lower, giant })
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn config(&self, mask: usize) -> Vec<bool> {
        let mut open = self.frozen.clone();
        for (b, &c) in self.free.iter().enumerate() {
            open[c] = mask >> b & 1 == 1;
        }
        open
    }

    /// Index of a configuration, or `None` if a frozen plaquette is closed.
    pub fn index_of(&self, open: &[bool]) -> Option<usize> {
        if open.iter().zip(&self.frozen).any(|(&o, &f)| f && !o) {
            return None;
        }
        Some(self.free.iter().enumerate().filter(|(_, &c)| open[c]).map(|(b, _)| 1 << b).sum())
    }

    /// Bit of a free plaquette in the configuration index.
    pub fn bit_of(&self, cell: usize) -> Option<usize> {
        self.free.iter().position(|&c| c == cell)
    }

    pub fn log_weights(&self, params: &RcmParams) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let g = self.giant.as_ref().map_or(0, |g| g[k] as usize);
                log_weight_from(params, self.cells, self.eta[k] as usize, self.betti_lower[k] as usize, g)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub stats: ConfigStats,
    pub params: RcmParams,
    pub probs: Vec<f64>,
    /// `ln Z` of the unbalanced weight.
    pub log_z: f64,
    /// `ln Z~` of the balanced weight (tori only).
    pub log_z_balanced: Option<f64>,
}

impl ExactDistribution {
    pub fn from_stats(stats: ConfigStats, params: RcmParams) -> Self {
        let unbalanced = stats.log_weights(&params.with_balanced(false));
        let log_z = log_sum_exp(&unbalanced);
        let log_z_balanced = stats.giant.as_ref().map(|_| log_sum_exp(&stats.log_weights(&params.with_balanced(true))));
        let lw = if params.balanced { stats.log_weights(&params) } else { unbalanced };
        let lz = log_sum_exp(&lw);
        let probs = lw.iter().map(|w| if *w == f64::NEG_INFINITY { 0.0 } else { exp(w - lz) }).collect();
        ExactDistribution { stats, params, probs, log_z, log_z_balanced }
    }

    pub fn z(&self) -> f64 {
        exp(self.log_z)
    }

    pub fn z_balanced(&self) -> Option<f64> {
        self.log_z_balanced.map(exp)
    }

    pub fn probability(&self, open: &[bool]) -> f64 {
        self.stats.index_of(open).map_or(0.0, |k| self.probs[k])
    }

    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs.iter().enumerate().map(|(k, &p)| if p == 0.0 { 0.0 } else { p * f(k) }).sum()
    }

    pub fn marginal(&self, cell: usize) -> f64 {
        match self.stats.bit_of(cell) {
            Some(b) => self.expect(|k| (k >> b & 1) as f64),
            None => 1.0,
        }
    }

    pub fn mean_eta(&self) -> f64 {
        self.expect(|k| self.stats.eta[k] as f64)
    }
}

pub fn exact_distribution(complex: &Complex, params: &RcmParams) -> Result<ExactDistribution> {
    params.validate(complex)?;
    let stats = ConfigStats::enumerate(complex, params.i, params.field)?;
    Ok(ExactDistribution::from_stats(stats, *params))
}

/// Heat-bath open probability of `cell` given the rest of `config`, with the
/// Betti delta obtained from an elimination over the other open plaquettes.
pub fn conditional_open_probability(
    complex: &Complex,
    params: &RcmParams,
    config: &PlaquetteConfig,
    cell: usize,
) -> Result<f64> {
    params.validate(complex)?;
    if params.balanced {
        return Err(Error::Unsupported("heat-bath conditionals of the balanced measure"));
    }
    if config.frozen()[cell] {
        return Ok(1.0);
    }
    let i = params.i;
    let f = params.field;
    let mut span = IncrementalSpan::new(f, complex.num_cells(i - 1), complex.num_cells(i));
    let bd = |c: usize| {
        let mut v: Vec<(usize, u32)> =
            complex.faces(i, c).iter().map(|&(x, s)| (x as usize, f.from_i64(s as i64))).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    };
    for c in (0..config.open.len()).filter(|&c| c != cell && config.open[c]) {
        span.insert(c, &bd(c));
    }
    let kills = !span.contains(&bd(cell));
    Ok(open_probability(params.p, params.q, kills))
}
