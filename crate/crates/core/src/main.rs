use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mixgrowth::lab::{self, exit, ConfigFile, ExperimentConfig, ExperimentId};
use mixgrowth::{Error, Result};

/// Runs one experiment and writes `<out>/<id>.csv` and `<out>/<id>.report.json`.
///
/// Without an experiment id, or with `list`, prints the experiment catalog as JSON.
#[derive(Parser, Debug)]
#[command(name = "mixgrowth", version)]
struct Cli {
    /// Experiment id, or `list`
    experiment: Option<String>,
    /// TOML or JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed, overriding the config file
    #[arg(long)]
    seed: Option<u64>,
}

fn configure(cli: &Cli, id: ExperimentId) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?.into_config(id)?,
        None => ExperimentConfig::new(id),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<i32> {
    let id = match cli.experiment.as_deref() {
        None | Some("list") => {
            let catalog = serde_json::to_string_pretty(&lab::list_experiments()).map_err(|e| Error::Io(e.to_string()))?;
            // a closed pipe is not an error for a listing
            let _ = writeln!(std::io::stdout(), "{catalog}");
            return Ok(exit::PASS);
        }
        Some(name) => name.parse::<ExperimentId>()?,
    };
    if let Some(n) = lab::threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Resource(e.to_string()))?;
    }
    let cfg = configure(cli, id)?;
    let report = lab::run(&cfg)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.ok { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {}", cfg.out.join(format!("{id}.csv")).display());
    Ok(if report.passed { exit::PASS } else { exit::INVARIANT })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::VALIDATION as u8 } else { exit::PASS as u8 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(lab::exit_code(&e) as u8)
        }
    }
}
