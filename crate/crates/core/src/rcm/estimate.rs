//! Markov chain estimates of event probabilities.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::backend::{AnyBackend, Backend, BackendKind};
use super::events::{Event, EventEvaluator};
use super::glauber::Glauber;
use super::RcmParams;
use crate::cubical::Complex;
use crate::pltg::SwendsenWang;
use crate::rng::{uniform, ChainRng};
use crate::stats::{batch_means, Estimate};
use crate::{Error, Result};

/// A chain on plaquette configurations.
pub trait Sampler {
    fn advance(&mut self);
    fn config(&self) -> &[bool];
}

impl<B: Backend> Sampler for Glauber<B> {
    fn advance(&mut self) {
        self.sweep();
    }

    fn config(&self) -> &[bool] {
        Glauber::config(self)
    }
}

impl Sampler for SwendsenWang<'_> {
    fn advance(&mut self) {
        self.step();
    }

    fn config(&self) -> &[bool] {
        self.open()
    }
}

/// Exact i.i.d. sampler of Bernoulli percolation (`q = 1`).
#[derive(Clone, Debug)]
pub struct Independent {
    p: f64,
    open: Vec<bool>,
    frozen: Vec<bool>,
    rng: ChainRng,
}

impl Independent {
    pub fn new(p: f64, frozen: Vec<bool>, rng: ChainRng) -> Self {
        Independent { p, open: frozen.clone(), frozen, rng }
    }
}

impl Sampler for Independent {
    fn advance(&mut self) {
        for (o, &f) in self.open.iter_mut().zip(&self.frozen) {
            *o = f || uniform(&mut self.rng) < self.p;
        }
    }

    fn config(&self) -> &[bool] {
        &self.open
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSettings {
    pub burn_in: usize,
    pub thinning: usize,
    pub n_samples: usize,
    pub n_batches: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        ChainSettings { burn_in: 1000, thinning: 10, n_samples: 1000, n_batches: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    /// Independent for `q = 1`, Swendsen–Wang when `q` is the field size,
    /// heat-bath otherwise.
    Auto,
    Glauber,
    SwendsenWang,
    Independent,
}

impl SamplerKind {
    pub fn resolve(self, params: &RcmParams) -> SamplerKind {
        match self {
            SamplerKind::Auto if params.q == 1.0 => SamplerKind::Independent,
            SamplerKind::Auto if params.is_coupled() => SamplerKind::SwendsenWang,
            SamplerKind::Auto => SamplerKind::Glauber,
            k => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Auto => "auto",
            SamplerKind::Glauber => "glauber",
            SamplerKind::SwendsenWang => "swendsen-wang",
            SamplerKind::Independent => "independent",
        }
    }
}

/// Builds a sampler started from the all-closed configuration.
pub fn make_sampler<'a>(
    complex: &'a Complex,
    params: &RcmParams,
    kind: SamplerKind,
    rng: ChainRng,
) -> Result<Box<dyn Sampler + 'a>> {
    params.validate(complex)?;
    if params.balanced {
        return Err(Error::Unsupported("sampling the balanced measure"));
    }
    let frozen = complex.frozen_mask(params.i);
    Ok(match kind.resolve(params) {
        SamplerKind::Independent => {
            if params.q != 1.0 {
                return Err(Error::InvalidParameter("the independent sampler needs q = 1"));
            }
            Box::new(Independent::new(params.p, frozen, rng))
        }
        SamplerKind::SwendsenWang => {
            if !params.is_coupled() {
                return Err(Error::InvalidParameter("Swendsen-Wang needs q equal to the field size"));
            }
            Box::new(SwendsenWang::new(complex, params.i, params.field, params.p, frozen, rng)?)
        }
        _ => {
            let backend = AnyBackend::new(complex, params.i, params.field, &frozen, BackendKind::Auto);
            Box::new(Glauber::new(backend, params.p, params.q, &frozen, rng))
        }
    })
}

/// Runs a chain and evaluates every event on each retained sample.
pub fn run_chain(
    sampler: &mut dyn Sampler,
    evaluator: &EventEvaluator,
    events: &[Event],
    settings: &ChainSettings,
) -> Result<Vec<Vec<f64>>> {
    for _ in 0..settings.burn_in {
        sampler.advance();
    }
    let mut out = alloc::vec![Vec::with_capacity(settings.n_samples); events.len()];
    for _ in 0..settings.n_samples {
        for _ in 0..settings.thinning.max(1) {
            sampler.advance();
        }
        for (k, e) in events.iter().enumerate() {
            out[k].push(evaluator.eval(e, sampler.config())? as u8 as f64);
        }
    }
    Ok(out)
}

pub fn estimate_events(
    complex: &Complex,
    params: &RcmParams,
    events: &[Event],
    settings: &ChainSettings,
    kind: SamplerKind,
    rng: ChainRng,
) -> Result<Vec<Estimate>> {
    let mut sampler = make_sampler(complex, params, kind, rng)?;
    let evaluator = EventEvaluator::new(complex, params.i, params.field);
    let xs = run_chain(sampler.as_mut(), &evaluator, events, settings)?;
    Ok(xs.iter().map(|x| batch_means(x, settings.n_batches)).collect())
}

pub fn estimate_event(
    complex: &Complex,
    params: &RcmParams,
    event: &Event,
    settings: &ChainSettings,
    kind: SamplerKind,
    rng: ChainRng,
) -> Result<Estimate> {
    Ok(estimate_events(complex, params, core::slice::from_ref(event), settings, kind, rng)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::{build_box, build_torus, Boundary};
    use crate::rcm::exact_distribution;
    use crate::rng::chain_rng;

    fn settings() -> ChainSettings {
        ChainSettings { burn_in: 200, thinning: 2, n_samples: 20_000, n_batches: 40 }
    }

    #[test]
    fn samplers_agree_with_enumeration_on_small_torus() {
        let t = build_torus(2, 2, 2).unwrap();
        for (p, q, kind) in [
            (0.4, 2.0, SamplerKind::SwendsenWang),
            (0.6, 3.0, SamplerKind::SwendsenWang),
            (0.5, 2.5, SamplerKind::Glauber),
            (0.4, 2.0, SamplerKind::Glauber),
            (0.3, 1.0, SamplerKind::Independent),
        ] {
            let params = RcmParams::new(p, q, 1).unwrap();
            let ex = exact_distribution(&t, &params).unwrap();
            let ev = EventEvaluator::new(&t, 1, params.field);
            let exact = ex.expect(|k| ev.eval(&Event::A, &ex.stats.config(k)).unwrap() as u8 as f64);
            let est = estimate_event(&t, &params, &Event::A, &settings(), kind, chain_rng(2, 0)).unwrap();
            assert!((est.mean - exact).abs() < 4.0 * est.stderr + 1e-3, "{kind:?} {p} {q}: {est:?} vs {exact}");
        }
    }

    #[test]
    fn swendsen_wang_marginal_on_wired_box() {
        let b = build_box(2, 1, 2, Boundary::Wired).unwrap();
        let params = RcmParams::new(0.5, 2.0, 1).unwrap();
        let ex = exact_distribution(&b, &params).unwrap();
        let cell = ex.stats.free[0];
        let exact = ex.marginal(cell);
        let mut s = make_sampler(&b, &params, SamplerKind::SwendsenWang, chain_rng(4, 0)).unwrap();
        let xs: Vec<f64> = (0..40_000)
            .map(|_| {
                s.advance();
                s.config()[cell] as u8 as f64
            })
            .collect();
        let est = batch_means(&xs, 40);
        assert!((est.mean - exact).abs() < 4.0 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn auto_resolution() {
        let r = |q: f64| SamplerKind::Auto.resolve(&RcmParams::new(0.5, q, 1).unwrap());
        assert_eq!(r(1.0), SamplerKind::Independent);
        assert_eq!(r(3.0), SamplerKind::SwendsenWang);
        assert_eq!(r(2.5), SamplerKind::Glauber);
        assert_eq!(r(4.0), SamplerKind::Glauber);
    }
}
