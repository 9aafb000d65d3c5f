use std::path::PathBuf;
use std::process::ExitCode;

use ahscatter::real::Precision;
use ahscatter_cli::{run, CliError, Engine, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ahscatter", version, about = "Scattering residues and resonances for warped AH metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Also write an SVG scatter of the zeros.
    #[arg(long, global = true)]
    svg: bool,
    /// Starting precision: double, dd or qd.
    #[arg(long, global = true)]
    precision: Option<Precision>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exact boundary recursion and scattering residues.
    Gz,
    /// Fourier jets of the normal form for n = 1.
    Normalform,
    /// Connection coefficients and S_l(λ) per mode.
    Modes,
    /// Zeros of A_l in a region, and eigenvalues on an interval.
    Resonances,
    /// Resonances accumulating at (n-1)/2 - k.
    Accumulate,
    /// Acceptance suite.
    Verify,
}

impl From<Command> for Engine {
    fn from(c: Command) -> Self {
        match c {
            Command::Gz => Engine::Gz,
            Command::Normalform => Engine::Normalform,
            Command::Modes => Engine::Modes,
            Command::Resonances => Engine::Resonances,
            Command::Accumulate => Engine::Accumulate,
            Command::Verify => Engine::Verify,
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.precision {
        cfg.precision = p;
    }
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    run(cli.command.into(), &cfg, &cli.out, cli.svg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
