//! Command-line surface of the `dfs-oneway` simulator: resource building,
//! transfer runs, state and process tomography, Bloch exports and the
//! end-to-end clean/noisy comparison.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod reproduce;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult, EXIT_CONFIG, EXIT_NUMERICAL};

#[derive(Parser, Debug)]
#[command(name = "dfs-oneway", version, about = "One-way transfer on standard and DFS cluster states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prepare a cluster-state resource.
    Build(commands::BuildArgs),
    /// Run one transfer and report its output.
    Run(commands::RunArgs),
    /// Simulate counts for a state and reconstruct it by maximum likelihood.
    TomoState(commands::TomoStateArgs),
    /// Process tomography of the transfer channel from the four probes.
    TomoProcess(commands::TomoProcessArgs),
    /// Export input/output Bloch vectors of a qubit channel as CSV.
    Bloch(commands::BlochArgs),
    /// Clean versus fully dephased transfer on both resources.
    Reproduce(reproduce::ReproduceArgs),
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Build(a) => commands::cmd_build(a),
        Command::Run(a) => commands::cmd_run(a),
        Command::TomoState(a) => commands::cmd_tomo_state(a),
        Command::TomoProcess(a) => commands::cmd_tomo_process(a),
        Command::Bloch(a) => commands::cmd_bloch(a),
        Command::Reproduce(a) => reproduce::cmd_reproduce(a),
    }
}
