//! Batch experiment driver for the crossed-product kernel laboratory.
//!
//! Exit codes: 0 success, 1 check failure, 2 config error, 3 numeric failure.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Parser)]
#[command(name = "crossedlab", version, about = "Config-driven experiments on crossed-product kernel algebras")]
struct Cli {
    /// Experiment config file (flat `key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Rayon worker threads; 0 picks the hardware default.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Seed for random-kernel sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Multiplies every assertion tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,

    /// List the named kernel presets and exit.
    #[arg(long)]
    list_presets: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list_presets {
        for preset in crossedlab::presets::catalog() {
            println!("{:<16} {}", preset.name, preset.definition);
        }
        return ExitCode::SUCCESS;
    }

    let Some(config_path) = cli.config else {
        eprintln!("config error: --config <path> is required (or use --list-presets)");
        return ExitCode::from(runner::EXIT_CONFIG as u8);
    };

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("cannot configure thread pool: {e}");
            return ExitCode::from(runner::EXIT_NUMERIC as u8);
        }
    }
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        eprintln!("config error: --tolerance-scale must be a positive number");
        return ExitCode::from(runner::EXIT_CONFIG as u8);
    }

    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(runner::EXIT_CONFIG as u8);
        }
    };
    let cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(runner::EXIT_CONFIG as u8);
        }
    };

    let out_dir = cli
        .out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = runner::RunOptions {
        out_dir,
        seed: cli.seed,
        tolerance_scale: cli.tolerance_scale,
    };
    ExitCode::from(runner::run(&cfg, &opts) as u8)
}
