//! `ssnmf`: fit, classify, benchmark and evaluate semi-supervised NMF models.
//!
//! Every subcommand reads an optional JSON config (`--config`) and lets
//! flags override its fields. Exit status is 0 on success, 1 when the
//! numerics fail and 2 for bad arguments, unreadable inputs or I/O errors.

mod cmd;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ssnmf",
    version,
    about = "Semi-supervised nonnegative matrix factorization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model to a data matrix and optional label matrix.
    Fit(cmd::fit::Args),
    /// Train a classifier and score it on held-out data.
    Classify(cmd::classify::Args),
    /// Run the synthetic maximum-likelihood benchmark.
    SynthBench(cmd::synth::Args),
    /// Turn a labeled text corpus into TF-IDF matrices.
    Prep(cmd::prep::Args),
    /// Print the top keywords of each topic.
    Topics(cmd::topics::Args),
    /// Score a representation against known subgroups.
    ClusterScore(cmd::cluster::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(a) => cmd::fit::run(a),
        Command::Classify(a) => cmd::classify::run(a),
        Command::SynthBench(a) => cmd::synth::run(a),
        Command::Prep(a) => cmd::prep::run(a),
        Command::Topics(a) => cmd::topics::run(a),
        Command::ClusterScore(a) => cmd::cluster::run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
