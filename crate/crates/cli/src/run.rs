//! The `sample`, `sweep`, `wilson` and `sw-run` subcommands as pure functions
//! from a config to output tables.

use rayon::prelude::*;
use serde_json::{json, Value};

use plaquette_core::cubical::build_torus;
use plaquette_core::homology::{betti, Subcomplex};
use plaquette_core::math::binomial;
use plaquette_core::pltg::scan::{fitted_bounds, rate_stderr, relative_spread};
use plaquette_core::pltg::sw::coherent_shift;
use plaquette_core::pltg::{area_perimeter_scan, beta_from_p, Coupling, ScanSettings, SpinSampler, SwendsenWang};
use plaquette_core::rcm::estimate::make_sampler;
use plaquette_core::rcm::events::{Event, EventEvaluator};
use plaquette_core::rcm::rare::{RareMethod, RareSettings};
use plaquette_core::rcm::{estimate_events, ChainSettings};
use plaquette_core::rng::chain_rng;
use plaquette_core::stats::batch_means;

use crate::output::{fmt_f64, Table};
use crate::{build_complex, field, pool_chains, rcm_params, sampler_kind, CliError, Config};

pub fn chain_settings(config: &Config) -> ChainSettings {
    let r = &config.run;
    ChainSettings { burn_in: r.burn_in, thinning: r.thinning, n_samples: r.n_samples, n_batches: r.n_batches }
}

fn require_seedable(config: &Config) -> Result<(), CliError> {
    if config.run.n_chains == 0 {
        return Err(CliError::Usage("n-chains must be positive".into()));
    }
    Ok(())
}

fn bit(b: bool) -> String {
    (b as u8).to_string()
}

/// One row per retained sample of every chain.
pub fn sample(config: &Config) -> Result<Table, CliError> {
    require_seedable(config)?;
    let (p, _) = config.coupling()?;
    let complex = build_complex(config)?;
    let params = rcm_params(config, p)?;
    let kind = sampler_kind(&config.run.sampler)?;
    let settings = chain_settings(config);
    let f = params.field;
    let torus = complex.is_torus();
    let chains: Vec<Result<Vec<Vec<String>>, CliError>> = (0..config.run.n_chains)
        .into_par_iter()
        .map(|k| {
            let mut s = make_sampler(&complex, &params, kind, chain_rng(config.run.seed, k as u64))?;
            let ev = EventEvaluator::new(&complex, params.i, f);
            for _ in 0..settings.burn_in {
                s.advance();
            }
            let mut rows = Vec::with_capacity(settings.n_samples);
            for t in 0..settings.n_samples {
                for _ in 0..settings.thinning.max(1) {
                    s.advance();
                }
                let open = s.config();
                let eta = open.iter().filter(|&&b| b).count();
                let sub = Subcomplex::plaquettes(&complex, params.i, open)?;
                let lower = betti(&sub, params.i - 1, f);
                let (a, full) = if torus {
                    (bit(ev.eval(&Event::A, open)?), bit(ev.eval(&Event::S, open)?))
                } else {
                    (String::new(), String::new())
                };
                rows.push(vec![k.to_string(), t.to_string(), eta.to_string(), lower.to_string(), a, full]);
            }
            Ok(rows)
        })
        .collect();
    let mut table = Table::new(&["chain", "sample", "eta", "betti_lower", "A", "S"]);
    for rows in chains {
        for r in rows? {
            table.push(r);
        }
    }
    Ok(table)
}

/// `μ̂(A)` and `μ̂(S)` across the `p` grid. Chain `k` uses the same random
/// stream at every `p`.
pub fn sweep(config: &Config) -> Result<Table, CliError> {
    require_seedable(config)?;
    let complex = build_complex(config)?;
    if !complex.is_torus() {
        return Err(CliError::Usage("sweep needs geometry = torus".into()));
    }
    let grid = config.grid()?;
    let kind = sampler_kind(&config.run.sampler)?;
    let settings = chain_settings(config);
    let chains = config.run.n_chains;
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..chains).map(move |k| (g, k))).collect();
    let results: Vec<Result<Vec<_>, CliError>> = jobs
        .par_iter()
        .map(|&(g, k)| {
            let params = rcm_params(config, grid[g])?;
            Ok(estimate_events(
                &complex,
                &params,
                &[Event::A, Event::S],
                &settings,
                kind,
                chain_rng(config.run.seed, k as u64),
            )?)
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["p", "mu_a", "stderr_a", "mu_s", "stderr_s", "n_samples"]);
    for (g, &p) in grid.iter().enumerate() {
        let per = &results[g * chains..(g + 1) * chains];
        let a = pool_chains(&per.iter().map(|e| e[0]).collect::<Vec<_>>());
        let s = pool_chains(&per.iter().map(|e| e[1]).collect::<Vec<_>>());
        table.push(vec![
            fmt_f64(p),
            fmt_f64(a.mean),
            fmt_f64(a.stderr),
            fmt_f64(s.mean),
            fmt_f64(s.stderr),
            a.n_samples.to_string(),
        ]);
    }
    Ok(table)
}

pub fn rare_method(name: &str) -> Result<RareMethod, CliError> {
    Ok(match name {
        "auto" => RareMethod::Auto,
        "naive" => RareMethod::Naive,
        "ladder" => RareMethod::Ladder,
        "complement" => RareMethod::Complement,
        other => return Err(CliError::Usage(format!("unknown method {other:?}"))),
    })
}

pub fn scan_settings(config: &Config) -> Result<ScanSettings, CliError> {
    let r = &config.run;
    let sampler = match r.sampler.as_str() {
        "auto" | "heat-bath" => SpinSampler::HeatBath,
        "swendsen-wang" => SpinSampler::SwendsenWang,
        other => return Err(CliError::Usage(format!("unknown gauge sampler {other:?}"))),
    };
    Ok(ScanSettings {
        wilson: chain_settings(config),
        sampler,
        skip_wilson: r.skip_wilson,
        rare: RareSettings {
            n_samples: r.rare_samples,
            burn_in: r.rare_burn_in,
            n_batches: r.n_batches,
            ..RareSettings::default()
        },
        method: rare_method(&r.method)?,
        margin: (r.margin > 0).then_some(r.margin),
        boundary: crate::boundary(config)?,
    })
}

/// Square Wilson loops on boxes: a wide table and a long-format table.
pub fn wilson(config: &Config) -> Result<(Table, Table, Value), CliError> {
    let r = &config.run;
    let f = field(config)?;
    if f.modulus() as f64 != r.q {
        return Err(CliError::Usage("wilson needs q prime and equal to the field size".into()));
    }
    let coupling = match (config.optional.p, config.optional.beta) {
        (Some(p), None) => Coupling::P(vec![p]),
        (None, Some(b)) => Coupling::Beta(vec![b]),
        _ => return Err(CliError::Usage("give exactly one of p and beta".into())),
    };
    let settings = scan_settings(config)?;
    let rows = area_perimeter_scan(r.d, r.i, f, &coupling, &r.loops, &settings, r.seed)?;
    let mut header: Vec<String> = ["beta", "p", "q", "i", "d", "N"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=r.i).map(|k| format!("n{k}")));
    header.extend(
        ["per", "area", "re_w", "im_w", "stderr", "v_gamma_est", "v_stderr", "n_samples", "seed"].iter().map(|s| s.to_string()),
    );
    let mut wide = Table { header, rows: Vec::new() };
    let mut long = Table::new(&["n", "quantity", "value", "stderr"]);
    let opt = |e: Option<f64>| e.map(fmt_f64).unwrap_or_default();
    for row in &rows {
        let mut cells =
            vec![fmt_f64(row.beta), fmt_f64(row.p), row.q.to_string(), row.i.to_string(), row.d.to_string(), row.box_half_width.to_string()];
        cells.extend(row.dims.iter().map(|n| n.to_string()));
        cells.extend([
            row.perimeter.to_string(),
            row.area.to_string(),
            opt(row.re_w.map(|e| e.mean)),
            opt(row.im_w.map(|e| e.mean)),
            opt(row.re_w.map(|e| e.stderr)),
            fmt_f64(row.v.mean),
            fmt_f64(row.v.stderr),
            row.v.n_samples.to_string(),
            row.seed.to_string(),
        ]);
        wide.push(cells);
        let n = row.dims[0].to_string();
        let mut put = |q: &str, v: f64, se: f64| long.push(vec![n.clone(), q.into(), fmt_f64(v), fmt_f64(se)]);
        if let (Some(re), Some(im)) = (row.re_w, row.im_w) {
            put("re_w", re.mean, re.stderr);
            put("im_w", im.mean, im.stderr);
        }
        put("v_gamma", row.v.mean, row.v.stderr);
        put("log_v_gamma", row.v.log_mean, row.v.log_stderr);
        put("area_rate", row.area_rate(), rate_stderr(row, true));
        put("perimeter_rate", row.perimeter_rate(), rate_stderr(row, false));
    }
    let area: Vec<f64> = rows.iter().map(|r| r.area_rate()).collect();
    let per: Vec<f64> = rows.iter().map(|r| r.perimeter_rate()).collect();
    let methods: Vec<&str> = rows.iter().map(|r| r.v.method.name()).collect();
    let extra = json!({
        "methods": methods,
        "area_rate_spread": relative_spread(&area),
        "perimeter_rate_spread": relative_spread(&per),
        "fitted_bounds": fitted_bounds(&rows).map(|(c1, c2)| json!({"c1": c1, "c2": c2})),
    });
    Ok((wide, long, extra))
}

/// Swendsen–Wang on the torus: fraction of steps that shift a whole family of
/// Wilson phases coherently, next to `μ̂(S)` and the limit `1 - q^{-C(d,i-1)}`.
pub fn sw_run(config: &Config) -> Result<Table, CliError> {
    require_seedable(config)?;
    let r = &config.run;
    if r.geometry != "torus" {
        return Err(CliError::Usage("sw-run needs geometry = torus".into()));
    }
    let f = field(config)?;
    if f.modulus() as f64 != r.q {
        return Err(CliError::Usage("sw-run needs q prime and equal to the field size".into()));
    }
    let grid = match (config.optional.p, config.optional.beta) {
        (None, None) => config.grid()?,
        _ => vec![config.coupling()?.0],
    };
    let complex = build_torus(r.d, r.n, r.d)?;
    let settings = chain_settings(config);
    let limit = 1.0 - r.q.powi(-(binomial(r.d, r.i - 1) as i32));
    let chains = r.n_chains;
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..chains).map(move |k| (g, k))).collect();
    let results: Vec<Result<_, CliError>> = jobs
        .par_iter()
        .map(|&(g, k)| {
            let mut sw = SwendsenWang::new(&complex, r.i, f, grid[g], complex.frozen_mask(r.i), chain_rng(r.seed, k as u64))?;
            let ev = EventEvaluator::new(&complex, r.i, f);
            for _ in 0..settings.burn_in {
                sw.step();
            }
            let (mut shifts, mut full) = (Vec::new(), Vec::new());
            for _ in 0..settings.n_samples {
                let before = sw.spins().to_vec();
                sw.step();
                shifts.push(coherent_shift(&complex, r.i, f, &before, sw.spins())? as u8 as f64);
                full.push(ev.eval(&Event::S, sw.open())? as u8 as f64);
                for _ in 1..settings.thinning.max(1) {
                    sw.step();
                }
            }
            Ok((batch_means(&shifts, settings.n_batches), batch_means(&full, settings.n_batches)))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "p",
        "beta",
        "nonlocal_fraction",
        "nonlocal_stderr",
        "mu_s",
        "stderr_s",
        "predicted_limit",
        "n_samples",
    ]);
    for (g, &p) in grid.iter().enumerate() {
        let per = &results[g * chains..(g + 1) * chains];
        let shift = pool_chains(&per.iter().map(|e| e.0).collect::<Vec<_>>());
        let s = pool_chains(&per.iter().map(|e| e.1).collect::<Vec<_>>());
        table.push(vec![
            fmt_f64(p),
            fmt_f64(beta_from_p(p)),
            fmt_f64(shift.mean),
            fmt_f64(shift.stderr),
            fmt_f64(s.mean),
            fmt_f64(s.stderr),
            fmt_f64(limit),
            shift.n_samples.to_string(),
        ]);
    }
    Ok(table)
}
