//! Estimators of `μ(V_γ)` across its whole range.
//!
//! * Naive: the chain average of `1_V`.
//! * Ladder: plaquettes of the filling are tilted from `p` up to a level where
//!   `V` is typical. Adjacent levels are linked by geometric bridge sampling and
//!   the top level is reweighted back to `p`.
//! * Complement: `1 - μ(V^c)` with `μ(V^c)` estimated by
//!   `Σ_e P(B_e | rest) + 1_{V^c} - Σ_e 1_{B_e}`, where `B_e ⊆ V^c` is the event
//!   that every coface of a loop cell `e` is closed. The conditional
//!   probabilities are exact sums over the cofaces of `e`.
//!
//! Chains use heat-bath updates. A focused sweep updates only plaquettes near
//! the filling; a full sweep runs every `full_every` steps.

use alloc::vec;
use alloc::vec::Vec;

use super::backend::{AnyBackend, Backend, BackendKind};
use super::events::{CycleTarget, EventEvaluator};
use super::glauber::Glauber;
use super::RcmParams;
use crate::cubical::{Chain, Complex};
use crate::math::{abs, ceil, exp, ln, log_sum_exp, logit, logistic, sqrt};
use crate::rng::ChainRng;
use crate::stats::{batch_means, Estimate};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RareMethod {
    Auto,
    Naive,
    Ladder,
    Complement,
}

impl RareMethod {
    pub fn name(self) -> &'static str {
        match self {
            RareMethod::Auto => "auto",
            RareMethod::Naive => "naive",
            RareMethod::Ladder => "ladder",
            RareMethod::Complement => "complement",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RareSettings {
    pub burn_in: usize,
    /// Sweeps between retained samples.
    pub thinning: usize,
    pub n_samples: usize,
    pub n_batches: usize,
    /// Samples of the pilot run used by [`RareMethod::Auto`].
    pub pilot_samples: usize,
    /// `L∞` radius, in lattice units, of the focused region; `None` sweeps everything.
    pub focus_radius: Option<i64>,
    pub full_every: usize,
    /// Ladder levels per unit of `|Δ logit| · sqrt(|filling|)`.
    pub levels_per_unit: f64,
    /// Tilted edge weight of the top ladder level.
    pub top_p: f64,
    /// Burn-in sweeps per ladder level after the first.
    pub level_burn_in: usize,
}

impl Default for RareSettings {
    fn default() -> Self {
        RareSettings {
            burn_in: 200,
            thinning: 2,
            n_samples: 2000,
            n_batches: 20,
            pilot_samples: 200,
            focus_radius: Some(3),
            full_every: 10,
            levels_per_unit: 1.0,
            top_p: 0.98,
            level_burn_in: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RareEstimate {
    pub method: RareMethod,
    pub mean: f64,
    pub stderr: f64,
    /// `ln` of the estimate and its delta-method standard error.
    pub log_mean: f64,
    pub log_stderr: f64,
    /// Retained samples across all chains and levels.
    pub n_samples: usize,
}

impl RareEstimate {
    fn from_linear(method: RareMethod, e: Estimate) -> Self {
        let log_mean = if e.mean > 0.0 { ln(e.mean) } else { f64::NEG_INFINITY };
        let log_stderr = if e.mean > 0.0 { e.stderr / e.mean } else { f64::INFINITY };
        RareEstimate { method, mean: e.mean, stderr: e.stderr, log_mean, log_stderr, n_samples: e.n_samples }
    }

    fn from_log(method: RareMethod, log_mean: f64, log_stderr: f64, n_samples: usize) -> Self {
        let mean = exp(log_mean);
        RareEstimate { method, mean, stderr: mean * log_stderr, log_mean, log_stderr, n_samples }
    }
}

/// Free plaquettes within `radius` of the filling's bounding box, or all free
/// plaquettes.
pub fn focus_region(complex: &Complex, i: usize, filling: &Chain, radius: Option<i64>) -> Vec<usize> {
    let frozen = complex.frozen_mask(i);
    let free = (0..complex.num_cells(i)).filter(|&c| !frozen[c]);
    let radius = match radius {
        Some(r) if !filling.is_zero() && !complex.is_torus() => r,
        _ => return free.collect(),
    };
    let d = complex.d();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for &(c, _) in filling.terms() {
        let cell = complex.cell(i, c);
        for a in 0..d {
            lo[a] = lo[a].min(cell.base[a]);
            hi[a] = hi[a].max(cell.base[a] + cell.dirs.contains(&a) as i64);
        }
    }
    free.filter(|&c| {
        let cell = complex.cell(i, c);
        (0..d).all(|a| {
            let top = cell.base[a] + cell.dirs.contains(&a) as i64;
            top >= lo[a] - radius && cell.base[a] <= hi[a] + radius
        })
    })
    .collect()
}

struct Chainer<'a> {
    chain: Glauber<AnyBackend>,
    region: Vec<usize>,
    full_every: usize,
    steps: usize,
    _complex: &'a Complex,
}

impl<'a> Chainer<'a> {
    fn new(complex: &'a Complex, params: &RcmParams, region: Vec<usize>, settings: &RareSettings, rng: ChainRng) -> Self {
        let frozen = complex.frozen_mask(params.i);
        let backend = AnyBackend::new(complex, params.i, params.field, &frozen, BackendKind::Auto);
        Chainer {
            chain: Glauber::new(backend, params.p, params.q, &frozen, rng),
            region,
            full_every: settings.full_every.max(1),
            steps: 0,
            _complex: complex,
        }
    }

    fn step(&mut self) {
        self.steps += 1;
        if self.steps % self.full_every == 0 {
            self.chain.sweep();
        } else {
            let region = core::mem::take(&mut self.region);
            self.chain.sweep_cells(&region);
            self.region = region;
        }
    }

    fn steps(&mut self, n: usize) {
        for _ in 0..n {
            self.step();
        }
    }
}

fn check(complex: &Complex, params: &RcmParams, target: &CycleTarget) -> Result<()> {
    params.validate(complex)?;
    if params.balanced {
        return Err(Error::Unsupported("rare-event estimates of the balanced measure"));
    }
    if target.gamma.dim() + 1 != params.i {
        return Err(Error::DimensionMismatch { expected: params.i - 1, found: target.gamma.dim() });
    }
    Ok(())
}

pub fn estimate_v(
    complex: &Complex,
    params: &RcmParams,
    target: &CycleTarget,
    method: RareMethod,
    settings: &RareSettings,
    rng: ChainRng,
) -> Result<RareEstimate> {
    check(complex, params, target)?;
    match method {
        RareMethod::Naive => naive(complex, params, target, settings, settings.n_samples, rng),
        RareMethod::Ladder => ladder(complex, params, target, settings, rng),
        RareMethod::Complement => complement(complex, params, target, settings, rng),
        RareMethod::Auto => {
            let mut pilot_rng = rng.clone();
            pilot_rng.set_stream(rng.get_stream().wrapping_add(1 << 32));
            let pilot = naive(complex, params, target, settings, settings.pilot_samples, pilot_rng)?;
            let m = if pilot.mean < 0.05 && target.filling.is_some() {
                RareMethod::Ladder
            } else if pilot.mean > 0.95 {
                RareMethod::Complement
            } else {
                RareMethod::Naive
            };
            estimate_v(complex, params, target, m, settings, rng)
        }
    }
}

fn naive(
    complex: &Complex,
    params: &RcmParams,
    target: &CycleTarget,
    settings: &RareSettings,
    n_samples: usize,
    rng: ChainRng,
) -> Result<RareEstimate> {
    let fill = target.filling.clone().unwrap_or_else(|| Chain::zero(params.i, params.field));
    let region = focus_region(complex, params.i, &fill, settings.focus_radius);
    let ev = EventEvaluator::new(complex, params.i, params.field);
    let mut c = Chainer::new(complex, params, region, settings, rng);
    c.steps(settings.burn_in);
    let mut xs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        c.steps(settings.thinning.max(1));
        xs.push(ev.null_homologous(target, c.chain.config())? as u8 as f64);
    }
    Ok(RareEstimate::from_linear(RareMethod::Naive, batch_means(&xs, settings.n_batches)))
}

/// Mean of `exp(x)` in log space with a delta-method standard error of the log.
fn log_mean_exp(xs: &[f64], n_batches: usize) -> (f64, f64) {
    let c = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if c == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let ys: Vec<f64> = xs.iter().map(|&x| exp(x - c)).collect();
    let e = batch_means(&ys, n_batches);
    (c + ln(e.mean), e.stderr / e.mean)
}

fn ladder(
    complex: &Complex,
    params: &RcmParams,
    target: &CycleTarget,
    settings: &RareSettings,
    rng: ChainRng,
) -> Result<RareEstimate> {
    let fill = target.filling.clone().ok_or(Error::Unsupported("ladder estimate of a loop without a filling"))?;
    let frozen = complex.frozen_mask(params.i);
    let tilted: Vec<usize> = fill.terms().iter().map(|&(c, _)| c).filter(|&c| !frozen[c]).collect();
    let r = tilted.len() as f64;
    let (p0, top) = (params.p, settings.top_p.max(params.p));
    if p0 <= 0.0 || top >= 1.0 {
        return Err(Error::InvalidParameter("ladder needs 0 < p and top_p < 1"));
    }
    let span = abs(logit(top) - logit(p0));
    let k = (ceil(span * sqrt(r.max(1.0)) * settings.levels_per_unit) as usize).max(1);
    let levels: Vec<f64> = (0..=k).map(|j| logistic(logit(p0) + (logit(top) - logit(p0)) * j as f64 / k as f64)).collect();
    let lw = |p: f64, m: f64| m * ln(p) + (r - m) * ln(1.0 - p);

    let region = focus_region(complex, params.i, &fill, settings.focus_radius);
    let ev = EventEvaluator::new(complex, params.i, params.field);
    let mut c = Chainer::new(complex, params, region, settings, rng);
    // Open counts in the tilted set, per level.
    let mut counts: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    let mut top_v = Vec::new();
    for (j, &p) in levels.iter().enumerate() {
        for &cell in &tilted {
            c.chain.set_p(cell, p);
        }
        c.steps(if j == 0 { settings.burn_in } else { settings.level_burn_in });
        let mut m = Vec::with_capacity(settings.n_samples);
        for _ in 0..settings.n_samples {
            c.steps(settings.thinning.max(1));
            let open = c.chain.config();
            m.push(tilted.iter().filter(|&&t| open[t]).count() as f64);
            if j == k {
                top_v.push(ev.null_homologous(target, open)?);
            }
        }
        counts.push(m);
    }
    let nb = settings.n_batches;
    let mut log_mu = 0.0;
    let mut var = 0.0;
    for j in 0..k {
        let (a, b) = (levels[j], levels[j + 1]);
        let half = |m: f64| 0.5 * (lw(b, m) - lw(a, m));
        let num: Vec<f64> = counts[j].iter().map(|&m| half(m)).collect();
        let den: Vec<f64> = counts[j + 1].iter().map(|&m| -half(m)).collect();
        let (ln_num, se_num) = log_mean_exp(&num, nb);
        let (ln_den, se_den) = log_mean_exp(&den, nb);
        log_mu += ln_num - ln_den;
        var += se_num * se_num + se_den * se_den;
    }
    let rw: Vec<f64> = counts[k]
        .iter()
        .zip(&top_v)
        .map(|(&m, &v)| if v { lw(p0, m) - lw(top, m) } else { f64::NEG_INFINITY })
        .collect();
    let (ln_top, se_top) = log_mean_exp(&rw, nb);
    log_mu += ln_top;
    var += se_top * se_top;
    Ok(RareEstimate::from_log(RareMethod::Ladder, log_mu, sqrt(var), counts.len() * settings.n_samples))
}

/// Exact `P(all cofaces of e closed | rest)` by a Gray-code walk over the
/// coface states, restoring the configuration afterwards.
fn blocked_probability<B: Backend>(chain: &mut Glauber<B>, cofaces: &[usize]) -> f64 {
    let q = chain.q();
    let lq = ln(q);
    let n = cofaces.len();
    let mut lw = 0.0;
    let mut closed_lw = None;
    let mut all = Vec::with_capacity(1 << n);
    let start: usize = cofaces.iter().enumerate().filter(|(_, &c)| chain.config()[c]).map(|(b, _)| 1 << b).sum();
    let mut state = start;
    for t in 0..(1usize << n) {
        if t > 0 {
            let bit = t.trailing_zeros() as usize;
            let cell = cofaces[bit];
            let p = chain.p(cell);
            let lr = ln(p) - ln(1.0 - p);
            let kills = q != 1.0 && chain.backend_mut().kills_cycle(cell);
            let opening = state >> bit & 1 == 0;
            let delta = lr - if kills { lq } else { 0.0 };
            lw += if opening { delta } else { -delta };
            chain.backend_mut().set_open(cell, opening);
            state ^= 1 << bit;
        }
        all.push(lw);
        if state == 0 {
            closed_lw = Some(lw);
        }
    }
    // Undo the last Gray-code toggle.
    let bit = n - 1;
    let cell = cofaces[bit];
    chain.backend_mut().set_open(cell, start >> bit & 1 == 1);
    exp(closed_lw.expect("all-closed state visited") - log_sum_exp(&all))
}

fn complement(
    complex: &Complex,
    params: &RcmParams,
    target: &CycleTarget,
    settings: &RareSettings,
    rng: ChainRng,
) -> Result<RareEstimate> {
    let i = params.i;
    let frozen = complex.frozen_mask(i);
    let blocks: Vec<Vec<usize>> = target
        .gamma
        .terms()
        .iter()
        .map(|&(e, _)| complex.cofaces(i - 1, e).iter().map(|&(c, _)| c as usize).collect::<Vec<_>>())
        .filter(|cof: &Vec<usize>| !cof.is_empty() && cof.iter().all(|&c| !frozen[c]))
        .collect();
    let fill = target.filling.clone().unwrap_or_else(|| Chain::zero(i, params.field));
    let region = focus_region(complex, i, &fill, settings.focus_radius);
    let ev = EventEvaluator::new(complex, i, params.field);
    let mut c = Chainer::new(complex, params, region, settings, rng);
    c.steps(settings.burn_in);
    let mut ys = Vec::with_capacity(settings.n_samples);
    for _ in 0..settings.n_samples {
        c.steps(settings.thinning.max(1));
        let mut y = if ev.null_homologous(target, c.chain.config())? { 0.0 } else { 1.0 };
        for cof in &blocks {
            if cof.iter().all(|&s| !c.chain.config()[s]) {
                y -= 1.0;
            }
            y += blocked_probability(&mut c.chain, cof);
        }
        ys.push(y);
    }
    let e = batch_means(&ys, settings.n_batches);
    let v = Estimate { mean: 1.0 - e.mean, stderr: e.stderr, n_samples: e.n_samples };
    Ok(RareEstimate::from_linear(RareMethod::Complement, v))
}
