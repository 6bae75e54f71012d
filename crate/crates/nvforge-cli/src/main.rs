// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! `nvforge` command-line front end: runs each analysis from a JSON config
//! and writes plot-ready CSV/JSON artifacts plus machine-readable run
//! metadata into the output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod emit;

#[derive(Parser)]
#[command(name = "nvforge", version, about = "NV-center register workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Spin transition frequencies versus magnetic field, with
    /// cross-relaxation-free windows.
    ZeemanScan(RunArgs),
    /// Optical Ex/Ey detunings versus cantilever strain.
    StrainScan(RunArgs),
    /// Verify the analytic gate constructions and report census and
    /// durations.
    Gates(RunArgs),
    /// Evaluate the six-term gate-error budget.
    ErrorBudget(RunArgs),
    /// Optimize piecewise-constant pulses for a target unitary and run
    /// process tomography.
    Grape(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ZeemanScan(args) => commands::zeeman_scan(args),
        Command::StrainScan(args) => commands::strain_scan(args),
        Command::Gates(args) => commands::gates(args),
        Command::ErrorBudget(args) => commands::error_budget(args),
        Command::Grape(args) => commands::grape(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
