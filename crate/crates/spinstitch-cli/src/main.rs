//! Batch front end for the spinstitch library.
//!
//! `spinstitch run --config experiments/sweep.json` executes one task and
//! writes its CSV tables, a gnuplot script where a plot makes sense, and a
//! run manifest. Exit codes: 0 success, 2 for anything wrong with the
//! request, 3 when the numerics fail or a refinement check does not settle
//! (partial results stay on disk with a FAILED marker).

mod config;
mod format;
mod plots;
mod tasks;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::RunConfig;
use tasks::{execute, Failure};

#[derive(Parser)]
#[command(name = "spinstitch", version, about = "Driven Ising-chain control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the task described by a JSON config file.
    Run {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for sweep and landscape points (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, jobs, out } = cli.command;
    match run(&config, jobs, out.as_deref()) {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(config_path: &Path, jobs: Option<usize>, out_dir: Option<&Path>) -> Result<ExitCode, Failure> {
    let started = Instant::now();
    let text = fs::read_to_string(config_path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("cannot parse {}: {e}", config_path.display())))?;

    if jobs == Some(0) {
        return Err(Failure::Config("--jobs must be at least 1".to_string()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(format!("cannot build worker pool: {e}")))?;
    let artifacts = pool.install(|| execute(&cfg))?;

    let dir = out_dir.unwrap_or(Path::new("."));
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, content) in artifacts.tables.iter().chain(artifacts.scripts.iter()) {
        let path = dir.join(name);
        fs::write(&path, content)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        written.push(name.clone());
    }

    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "task": cfg.task,
        "config": cfg,
        "resolved": artifacts.resolved,
        "outputs": written,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    let manifest_name = format!("{}_manifest.json", cfg.stem());
    let manifest_path = dir.join(&manifest_name);
    fs::write(&manifest_path, format!("{:#}\n", manifest))
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", manifest_path.display())))?;

    for name in written.iter().chain(std::iter::once(&manifest_name)) {
        println!("wrote {}", dir.join(name).display());
    }
    if artifacts.failed_rows {
        eprintln!("step-refinement check did not settle; results carry a FAILED marker");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
