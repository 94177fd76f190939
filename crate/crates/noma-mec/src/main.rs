use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use noma_mec::experiment::{self, Config};

/// Minimum task-completion-time resource allocation experiments for NOMA
/// mobile-edge computing.
#[derive(Parser)]
#[command(name = "noma-mec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one generated scenario and write a flat result record.
    Solve {
        /// Flat key-value config file.
        config: PathBuf,
        /// Solver: bss | closed2 | oracle | ofdma | full | local.
        #[arg(long, default_value = "bss")]
        solver: String,
        /// Override the config's scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one parameter axis across solvers and write a CSV table.
    Sweep {
        config: PathBuf,
        /// Axis to vary: p_max | e_max | M | L.
        #[arg(long)]
        vary: String,
        /// Axis values, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        /// Solvers to run, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "bss")]
        solvers: Vec<String>,
        /// Seeds per point: config seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the bisection convergence trace for one scenario as CSV.
    Trace {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<(), experiment::CliFailure> {
        match &cli.command {
            Command::Solve { config, solver, seed, out } => {
                let cfg = Config::load(config)?;
                experiment::run_solve(&cfg, solver, *seed, out)
            }
            Command::Sweep { config, vary, values, solvers, trials, out } => {
                let cfg = Config::load(config)?;
                experiment::run_sweep(&cfg, vary, values, solvers, *trials, out)
            }
            Command::Trace { config, seed, out } => {
                let cfg = Config::load(config)?;
                experiment::run_trace(&cfg, *seed, out)
            }
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit_code as u8)
        }
    }
}
