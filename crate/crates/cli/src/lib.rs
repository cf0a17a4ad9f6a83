//! Command-line driver for `plaquette-core`: experiment configuration, chain
//! orchestration, CSV/JSON output and the verification suite.

use std::fmt;

use plaquette_core::cubical::{build_box, build_torus, Boundary, Complex};
use plaquette_core::field::PrimeField;
use plaquette_core::rcm::{default_field, RcmParams, SamplerKind};
use plaquette_core::stats::Estimate;

pub mod config;
pub mod lambda;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{Config, RunConfig};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "PLAQUETTE_RCM_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Model(plaquette_core::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<plaquette_core::Error> for CliError {
    fn from(e: plaquette_core::Error) -> Self {
        CliError::Model(e)
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CHECK_FAILED: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
}

/// A rayon pool capped by [`THREADS_ENV`] when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
        if n == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer")));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn field(config: &Config) -> Result<PrimeField, CliError> {
    match config.optional.field {
        Some(q) => Ok(PrimeField::new(q)?),
        None => Ok(default_field(config.run.q)),
    }
}

pub fn boundary(config: &Config) -> Result<Boundary, CliError> {
    match config.run.boundary.as_str() {
        "free" => Ok(Boundary::Free),
        "wired" => Ok(Boundary::Wired),
        other => Err(CliError::Usage(format!("unknown boundary {other:?}"))),
    }
}

pub fn build_complex(config: &Config) -> Result<Complex, CliError> {
    let r = &config.run;
    match r.geometry.as_str() {
        "torus" => Ok(build_torus(r.d, r.n, r.d)?),
        "box" => Ok(build_box(r.d, r.n, r.d, boundary(config)?)?),
        other => Err(CliError::Usage(format!("unknown geometry {other:?}"))),
    }
}

pub fn rcm_params(config: &Config, p: f64) -> Result<RcmParams, CliError> {
    let params = RcmParams::new(p, config.run.q, config.run.i)?.with_field(field(config)?);
    if config.run.balanced {
        return Err(CliError::Usage("the balanced measure is only available through exact enumeration".into()));
    }
    Ok(params)
}

pub fn sampler_kind(name: &str) -> Result<SamplerKind, CliError> {
    Ok(match name {
        "auto" => SamplerKind::Auto,
        "glauber" | "heat-bath" => SamplerKind::Glauber,
        "swendsen-wang" => SamplerKind::SwendsenWang,
        "independent" => SamplerKind::Independent,
        other => return Err(CliError::Usage(format!("unknown sampler {other:?}"))),
    })
}

/// Equal-weight pooling of per-chain estimates of the same quantity.
pub fn pool_chains(estimates: &[Estimate]) -> Estimate {
    let k = estimates.len().max(1) as f64;
    let mean = estimates.iter().map(|e| e.mean).sum::<f64>() / k;
    let var = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>() / (k * k);
    Estimate { mean, stderr: var.sqrt(), n_samples: estimates.iter().map(|e| e.n_samples).sum() }
}
