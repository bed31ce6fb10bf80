use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coshlab_cli::{cmd_monodromy, cmd_report, cmd_solve, cmd_toda, cmd_verify, load_config, CliError, Outcome, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "coshlab", version, about = "Cosh-Gordon / sinh-Gordon numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid points per axis; overrides the config.
    #[arg(long, global = true)]
    resolution_override: Option<usize>,
    /// Seed for randomized probes; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the configured equation.
    Solve,
    /// Run the identity suite on stored solutions.
    Verify,
    /// Holonomies around the configured loops.
    Monodromy,
    /// Liouville fields from holomorphic data, or Toda residuals.
    Toda,
    /// Solve, verify, and everything else the config asks for.
    Report,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let ov = Overrides {
        out: cli.out.clone(),
        resolution: cli.resolution_override,
        seed: cli.seed,
    };
    let cfg: RunConfig = load_config(path, &ov)?;
    match cli.command {
        Command::Solve => cmd_solve(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Monodromy => cmd_monodromy(&cfg),
        Command::Toda => cmd_toda(&cfg),
        Command::Report => cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("  wrote {f}");
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
