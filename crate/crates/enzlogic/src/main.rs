use std::io::{stderr, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use enzlogic::cli;

/// Simulate enzyme-driven logic gates and verify their dynamic behavior
/// against an ideal Boolean reference.
#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write the concentration trace as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed (random waveforms).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print equilibrium truth-table rows against the Boolean reference.
    TruthTable {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the delayed-recovery property of a simulated scenario.
    CheckSeqmap {
        /// One or more scenario files; several run concurrently with --jobs.
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Scenarios to run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print closed-form NOT-gate settle bounds and measured settle times.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Synthesize an expression (or latch) and dump the netlist.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Write the dump here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let mut out = stdout().lock();
    let mut err = stderr().lock();
    let code = match args.command {
        Command::Simulate {
            config,
            out: path,
            seed,
        } => cli::cmd_simulate(&config, &path, seed, &mut err),
        Command::TruthTable { config } => cli::cmd_truth_table(&config, &mut out, &mut err),
        Command::CheckSeqmap {
            configs,
            seed,
            jobs,
        } => {
            if configs.len() == 1 && jobs <= 1 {
                cli::cmd_check_seqmap(&configs[0], seed, &mut out, &mut err)
            } else {
                cli::cmd_check_seqmap_batch(&configs, seed, jobs, &mut out, &mut err)
            }
        }
        Command::Bounds { config } => cli::cmd_bounds(&config, &mut out, &mut err),
        Command::Synth { config, out: path } => {
            cli::cmd_synth(&config, path.as_deref(), &mut out, &mut err)
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}
