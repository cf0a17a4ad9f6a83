use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use plaquette_cli::config::{Config, OptionalOverrides, Overrides};
use plaquette_cli::output::{emit_plot_script, emit_table, meta, sidecar, write_bytes, write_json};
use plaquette_cli::verify::{self, Fault, Suite};
use plaquette_cli::{exit, lambda, run, thread_pool, CliError};

#[derive(Parser)]
#[command(name = "plaquette", version, about = "Plaquette random-cluster model and Potts lattice gauge theory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-sample observables of a chain.
    Sample(Common),
    /// `μ(A)` and `μ(S)` over a grid of `p`.
    Sweep(Common),
    /// Bisection for the `p` with `μ(A) = 1/2`.
    Lambda(Common),
    /// Square Wilson loops and `μ(V_γ)` on boxes.
    Wilson(Common),
    /// Swendsen–Wang non-local move statistics on the torus.
    SwRun(Common),
    /// Exact-identity verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(flatten)]
    optional: OptionalOverrides,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    duality: bool,
    #[arg(long)]
    partition: bool,
    #[arg(long)]
    alexander: bool,
    /// Coupling marginals and the Wilson identity.
    #[arg(long)]
    coupling: bool,
    #[arg(long)]
    sw_stationarity: bool,
    #[arg(long)]
    homology: bool,
    #[arg(long)]
    fkg: bool,
    /// Recorded in the report; the suite itself is seed-free.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true, value_parser = ["weight"])]
    inject_fault: Option<String>,
}

fn load(c: &Common) -> Result<Config, CliError> {
    Config::load(c.config.as_deref(), &c.overrides, &c.optional)
}

fn finish(config: &Config, x: &str, ys: &[&str]) -> Result<(), CliError> {
    if config.run.emit_plot_script {
        let path = emit_plot_script(&config.run.out, x, ys)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run_command(cli: Cli) -> Result<i32, CliError> {
    let pool = thread_pool()?;
    match cli.command {
        Command::Sample(c) => {
            let config = load(&c)?;
            let table = pool.install(|| run::sample(&config))?;
            emit_table(&config.run.out, &table, &meta("sample", config.to_json(), json!(null)))?;
            finish(&config, "sample", &["eta", "betti_lower"])?;
        }
        Command::Sweep(c) => {
            let config = load(&c)?;
            let table = pool.install(|| run::sweep(&config))?;
            emit_table(&config.run.out, &table, &meta("sweep", config.to_json(), json!(null)))?;
            finish(&config, "p", &["mu_a", "mu_s"])?;
        }
        Command::Lambda(c) => {
            let config = load(&c)?;
            let (table, results) = pool.install(|| lambda::lambda(&config))?;
            let points: Vec<_> = results
                .iter()
                .map(|r| {
                    let pts: Vec<_> = r.points.iter().map(|(p, e)| json!({"p": p, "mu_a": e.mean, "stderr": e.stderr, "n_samples": e.n_samples})).collect();
                    json!({"N": r.n, "points": pts})
                })
                .collect();
            emit_table(&config.run.out, &table, &meta("lambda", config.to_json(), json!({ "bisection": points })))?;
            finish(&config, "N", &["lambda"])?;
            if results.iter().any(|r| !r.converged) {
                eprintln!("bisection did not converge within max-iter");
                return Ok(exit::NOT_CONVERGED);
            }
        }
        Command::Wilson(c) => {
            let config = load(&c)?;
            let (wide, long, extra) = pool.install(|| run::wilson(&config))?;
            let m = meta("wilson", config.to_json(), extra);
            emit_table(&config.run.out, &wide, &m)?;
            if !config.run.out.is_empty() {
                let long_path = Path::new(&config.run.out).with_extension("long.csv");
                write_bytes(&long_path.to_string_lossy(), &long.to_csv()?)?;
                write_json(&sidecar(&long_path), &m)?;
            }
            finish(&config, "area", &["v_gamma_est"])?;
        }
        Command::SwRun(c) => {
            let config = load(&c)?;
            let table = pool.install(|| run::sw_run(&config))?;
            emit_table(&config.run.out, &table, &meta("sw-run", config.to_json(), json!(null)))?;
            finish(&config, "p", &["nonlocal_fraction", "mu_s", "predicted_limit"])?;
        }
        Command::Verify(v) => {
            let flags = [v.duality, v.partition, v.alexander, v.coupling, v.sw_stationarity, v.homology, v.fkg];
            let mut suite = Suite::default();
            if flags.iter().any(|&b| b) {
                suite.groups = verify::GROUPS.iter().zip(flags).filter(|(_, b)| *b).map(|(g, _)| *g).collect();
            }
            if v.inject_fault.is_some() {
                suite.fault = Fault::Weight;
            }
            let checks = verify::run(&suite)?;
            for c in &checks {
                eprintln!("{} [{}] {}: {:e} (tol {:e})", if c.passed { "PASS" } else { "FAIL" }, c.group, c.name, c.value, c.tolerance);
            }
            let m = json!({
                "version": plaquette_cli::output::VERSION,
                "rng": plaquette_core::rng::RNG_NAME,
                "seed": v.seed,
                "groups": suite.groups,
                "fault_injected": v.inject_fault.is_some(),
            });
            let report = verify::report(&checks, m);
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            text.push('\n');
            match &v.out {
                Some(p) => write_bytes(&p.to_string_lossy(), text.as_bytes())?,
                None => write_bytes("", text.as_bytes())?,
            }
            if checks.iter().any(|c| !c.passed) {
                eprintln!("verification failed");
                return Ok(exit::CHECK_FAILED);
            }
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run_command(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) | CliError::Model(_) => exit::USAGE,
                CliError::Io(_) => exit::USAGE,
            } as u8)
        }
    }
}
