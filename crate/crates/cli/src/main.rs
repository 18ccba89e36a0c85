//! `nilskew`: config-driven experiment runner.

mod config;
mod error;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{ExperimentConfig, Format};
use error::CliError;
use run::Kind;

#[derive(Debug, Parser)]
#[command(name = "nilskew", version, about = "Experiments on Heisenberg skew products")]
struct Cli {
    #[arg(value_enum)]
    kind: Kind,
    /// JSON experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides `system.alpha`.
    #[arg(long)]
    alpha: Option<String>,
    /// Overrides the experiment length (`orbit.n`, `correlate.n`, `cf.k_max`).
    #[arg(short, long)]
    n: Option<u64>,
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.display().to_string());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(a) = &cli.alpha {
        cfg.system.alpha = a.clone();
    }
    if let Some(n) = cli.n {
        match cli.kind {
            Kind::Orbit => cfg.orbit.n = n,
            Kind::Correlate => cfg.correlate.n = n,
            Kind::Cf => cfg.cf.k_max = n as usize,
            _ => return Err(CliError::Config("-n applies to cf, orbit and correlate".into())),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = configure(cli)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let artifact = run::run(cli.kind, &cfg)?;
    let bytes = artifact.render(cfg.format);
    match &cfg.out {
        Some(path) => output::write_atomic(path.as_ref(), &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    if cli.kind == Kind::OracleCheck {
        let failed = artifact.meta.get("failed").and_then(|v| v.as_u64()).unwrap_or(0);
        if failed > 0 {
            return Err(CliError::OracleFailed(failed as usize));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
