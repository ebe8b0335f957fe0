use clap::Parser;
use macroqsim_cli::config::Experiment;
use macroqsim_cli::error::CliError;
use macroqsim_cli::{execute, Invocation};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run a macroqsim experiment from a TOML config.
#[derive(Parser)]
#[command(name = "macroqsim", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,

    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: the config's output.dir, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,

    /// Seeds, overriding the config's `seeds`.
    #[arg(long, num_args = 1..)]
    seed: Vec<u64>,

    /// lg-chsh only: evaluate the reference state and settings and scan σ
    /// instead of searching.
    #[arg(long)]
    reference: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if k == 0 {
            eprintln!("error: config: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().expect("thread pool is built once");
    }
    let inv = Invocation { experiment: args.experiment, config: args.config, out: args.out, seeds: args.seed, reference: args.reference };
    match execute(&inv) {
        Ok(dir) => {
            println!("{}", dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e))
        }
    }
}
