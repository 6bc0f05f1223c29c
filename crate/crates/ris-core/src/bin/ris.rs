use clap::{Parser, Subcommand};
use ris_core::cli;
use std::path::PathBuf;
use std::process::ExitCode;

/// Rate-independent bulk damage simulator and certificate suite.
#[derive(Parser)]
#[command(name = "ris", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, verify its certificate and write all outputs.
    Run { config: PathBuf },
    /// Time-step refinement sweep at the given step counts.
    Sweep {
        config: PathBuf,
        /// Comma-separated step counts, strictly increasing and nested.
        #[arg(long, value_delimiter = ',', required = true)]
        taus: Vec<usize>,
    },
    /// Energetic-versus-separately-global comparison on the [toy] block.
    Compare { config: PathBuf },
    /// Lipschitz-truncate a scalar field file.
    Truncate {
        field: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // RIS_THREADS bounds the worker pool used for competitor evaluations and
    // sweep runs; results are bit-identical for any worker count.
    if let Ok(threads) = std::env::var("RIS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let args = Args::parse();
    let result = match &args.command {
        Command::Run { config } => cli::cmd_run(config),
        Command::Sweep { config, taus } => cli::cmd_sweep(config, taus),
        Command::Compare { config } => cli::cmd_compare(config),
        Command::Truncate { field, lambda, out } => {
            cli::cmd_truncate(field, *lambda, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
