//! Run configuration: a flat JSON document whose keys double as CLI flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

macro_rules! run_config {
    ($( #[doc = $doc:literal] $name:ident : $ty:ty = $default:expr $(; [$($arg:tt)+])? ),* $(,)?) => {
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
        pub struct RunConfig {
            $( #[doc = $doc] pub $name: $ty, )*
        }

        impl Default for RunConfig {
            fn default() -> Self {
                RunConfig { $( $name: $default, )* }
            }
        }

        /// Flag overrides, one per config key.
        #[derive(Clone, Debug, Default, clap::Args)]
        pub struct Overrides {
            $( #[doc = $doc] #[arg(long $(, $($arg)+)?)] pub $name: Option<$ty>, )*
        }

        impl Overrides {
            pub fn apply(&self, config: &mut RunConfig) {
                $( if let Some(v) = &self.$name { config.$name = v.clone(); } )*
            }
        }
    };
}

macro_rules! optional_fields {
    ($( #[doc = $doc:literal] $name:ident : $ty:ty ),* $(,)?) => {
        #[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
        #[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
        pub struct Optional {
            $( #[doc = $doc] #[serde(skip_serializing_if = "Option::is_none")] pub $name: Option<$ty>, )*
        }

        /// Flag overrides for keys without a default.
        #[derive(Clone, Debug, Default, clap::Args)]
        pub struct OptionalOverrides {
            $( #[doc = $doc] #[arg(long)] pub $name: Option<$ty>, )*
        }

        impl OptionalOverrides {
            pub fn apply(&self, config: &mut Optional) {
                $( if self.$name.is_some() { config.$name = self.$name.clone(); } )*
            }
        }
    };
}

run_config! {
    /// Ambient dimension.
    d: usize = 2,
    /// `torus` or `box`.
    geometry: String = "torus".into(),
    /// Torus side length, or half-width of the box `[-n, n]^d`.
    n: usize = 16,
    /// Box boundary condition: `free` or `wired`.
    boundary: String = "free".into(),
    /// Cluster parameter.
    q: f64 = 2.0,
    /// Plaquette dimension.
    i: usize = 1,
    /// Sample the balanced measure (exact enumeration only).
    balanced: bool = false; [num_args = 0..=1, default_missing_value = "true"],
    /// `auto`, `glauber`, `swendsen-wang` or `independent`; `heat-bath` or `swendsen-wang` for gauge chains.
    sampler: String = "auto".into(),
    /// Sweeps discarded before sampling.
    burn_in: usize = 1000,
    /// Sweeps between retained samples.
    thinning: usize = 10,
    /// Retained samples per chain.
    n_samples: usize = 1000,
    /// Batches for batch-means standard errors.
    n_batches: usize = 20,
    /// Independent chains per estimate, pooled in chain order.
    n_chains: usize = 1,
    /// Master seed; chain `k` uses stream `k`.
    seed: u64 = 0,
    /// Lower end of the `p` grid.
    p_min: f64 = 0.4,
    /// Upper end of the `p` grid.
    p_max: f64 = 0.75,
    /// Number of grid points.
    steps: usize = 8,
    /// Target value of `μ(A)` for bisection.
    target: f64 = 0.5,
    /// Bisection stops once the bracket is this narrow.
    tolerance: f64 = 0.01,
    /// Maximum bisection steps.
    max_iter: usize = 20,
    /// Sample cap per chain when re-estimating an ambiguous midpoint.
    max_samples: usize = 16000,
    /// Normal quantile of the confidence intervals.
    z: f64 = 1.96,
    /// Torus sizes for `lambda`; empty means `[n]`.
    sizes: Vec<usize> = Vec::new(); [value_delimiter = ','],
    /// Square loop side lengths for `wilson`.
    loops: Vec<usize> = vec![2, 3, 4, 5]; [value_delimiter = ','],
    /// Distance from each loop's filling to the box boundary; 0 means the side length.
    margin: usize = 0,
    /// Estimator of `μ(V_γ)`: `auto`, `naive`, `ladder` or `complement`.
    method: String = "auto".into(),
    /// Retained samples per `μ(V_γ)` estimate.
    rare_samples: usize = 2000,
    /// Burn-in sweeps for `μ(V_γ)` chains.
    rare_burn_in: usize = 200,
    /// Skip the gauge chain in `wilson`.
    skip_wilson: bool = false; [num_args = 0..=1, default_missing_value = "true"],
    /// Output CSV path; stdout when empty.
    out: String = String::new(),
    /// Write a plotting script next to the output.
    emit_plot_script: bool = false; [num_args = 0..=1, default_missing_value = "true"],
}

optional_fields! {
    /// Plaquette open probability.
    p: f64,
    /// Gauge coupling; `p = 1 - e^{-β}`.
    beta: f64,
    /// Coefficient field size; `q` when prime, 2 otherwise.
    field: u64,
}

/// The full configuration: keys with defaults plus optional keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Config {
    #[serde(flatten)]
    pub run: RunConfig,
    #[serde(flatten)]
    pub optional: Optional,
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: &Overrides, optional: &OptionalOverrides) -> Result<Config, CliError> {
        let mut config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                Config::from_json(&text)?
            }
            None => Config::default(),
        };
        overrides.apply(&mut config.run);
        optional.apply(&mut config.optional);
        Ok(config)
    }

    /// Parses a flat JSON object; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Config, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        let obj = value.as_object().ok_or_else(|| CliError::Usage("config must be a JSON object".into()))?;
        let (mut run, mut opt) = (serde_json::Map::new(), serde_json::Map::new());
        for (k, v) in obj {
            if matches!(k.as_str(), "p" | "beta" | "field") {
                opt.insert(k.clone(), v.clone());
            } else {
                run.insert(k.clone(), v.clone());
            }
        }
        let run = serde_json::from_value(run.into()).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        let optional = serde_json::from_value(opt.into()).map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
        Ok(Config { run, optional })
    }

    /// `p` from either `p` or `beta`; exactly one must be set.
    pub fn coupling(&self) -> Result<(f64, f64), CliError> {
        match (self.optional.p, self.optional.beta) {
            (Some(p), None) => Ok((p, plaquette_core::pltg::beta_from_p(p))),
            (None, Some(beta)) => Ok((plaquette_core::pltg::bond_probability(beta), beta)),
            (Some(_), Some(_)) => Err(CliError::Usage("give exactly one of p and beta".into())),
            (None, None) => Err(CliError::Usage("one of p or beta is required".into())),
        }
    }

    /// Evenly spaced grid from `p-min` to `p-max`.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let r = &self.run;
        if !(0.0..=1.0).contains(&r.p_min) || !(0.0..=1.0).contains(&r.p_max) || r.p_min > r.p_max || r.steps == 0 {
            return Err(CliError::Usage("invalid grid: need 0 <= p-min <= p-max <= 1 and steps >= 1".into()));
        }
        if r.steps == 1 {
            return Ok(vec![r.p_min]);
        }
        let h = (r.p_max - r.p_min) / (r.steps - 1) as f64;
        Ok((0..r.steps).map(|k| if k + 1 == r.steps { r.p_max } else { r.p_min + h * k as f64 }).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_overrides() {
        let c = Config::from_json(r#"{"d": 3, "p": 0.4, "loops": [2, 3], "burn-in": 5}"#).unwrap();
        assert_eq!((c.run.d, c.run.burn_in, c.optional.p), (3, 5, Some(0.4)));
        assert_eq!(c.run.loops, vec![2, 3]);
        let back = Config::from_json(&c.to_json().to_string()).unwrap();
        assert_eq!(back, c);
        let o = Overrides { d: Some(4), ..Default::default() };
        let mut run = c.run.clone();
        o.apply(&mut run);
        assert_eq!(run.d, 4);
    }

    #[test]
    fn rejects_unknown_keys_and_double_coupling() {
        assert!(Config::from_json(r#"{"dd": 3}"#).is_err());
        let c = Config::from_json(r#"{"p": 0.4, "beta": 1.0}"#).unwrap();
        assert!(c.coupling().is_err());
    }

    #[test]
    fn grid_endpoints() {
        let c = Config::from_json(r#"{"p-min": 0.0, "p-max": 1.0, "steps": 5}"#).unwrap();
        assert_eq!(c.grid().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
