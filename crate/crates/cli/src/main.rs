use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rotational_orbits_cli::{cmd_estimate, cmd_solve, cmd_sweep, cmd_verify, CliError, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "rotorb", version, about = "Rotational periodic orbits of spatially periodic Hamiltonian systems")]
struct Args {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fourier modes M; also resets the quadrature to 4M + 1 nodes.
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Quadrature nodes N.
    #[arg(long, global = true)]
    quad: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Constants, bounds and hypothesis checks.
    Estimate,
    /// Multi-start search, acceptance and verification.
    Solve,
    /// Re-shoot trajectory files written by `solve`.
    Verify,
    /// Solve over a grid of periods.
    Sweep,
}

fn run(args: &Args) -> Result<Outcome, CliError> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = RunConfig::from_file(path)?;
    cfg.apply_overrides(args.seed, args.modes, args.quad);
    match args.command {
        Command::Estimate => cmd_estimate(&cfg, &args.out),
        Command::Solve => cmd_solve(&cfg, &args.out),
        Command::Verify => cmd_verify(&cfg, &args.out),
        Command::Sweep => cmd_sweep(&cfg, &args.out),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
