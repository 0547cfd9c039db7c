//! `tradenet` — trade-network ingestion, scaling analyses, rich-club
//! ensembles, and the gravity exchange simulator behind one binary.
//!
//! Every subcommand writes plot-ready CSV/JSON artifacts plus a
//! `manifest.json` into its `--out` directory and nothing anywhere else.
//! Seeded commands are bit-reproducible from their manifest.

mod cmd;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "tradenet", version, about, propagate_version = true)]
struct Cli {
    /// Worker threads for ensembles and per-year analyses
    /// (default: all available cores).
    #[arg(long, global = true, env = "TRADENET_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse dyadic trade reports into per-year weighted networks.
    Ingest(cmd::ingest::IngestArgs),
    /// Fit weight-collapse curves, GDP elasticities, and scaling exponents.
    Analyze(cmd::analyze::AnalyzeArgs),
    /// Rich-club curves with degree- and strength-preserving null ensembles.
    Richclub(cmd::richclub::RichclubArgs),
    /// Grow a synthetic trade network with the gravity exchange model.
    Simulate(cmd::simulate::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; only real usage errors
            // should exit nonzero.
            let code = if err.use_stderr() { error::EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {err}");
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::Ingest(args) => cmd::ingest::run(args),
        Command::Analyze(args) => cmd::analyze::run(args),
        Command::Richclub(args) => cmd::richclub::run(args),
        Command::Simulate(args) => cmd::simulate::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
