use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sternet_cli::config::Overrides;
use sternet_cli::{run, Command};

#[derive(Parser)]
#[command(name = "sternet", version, about = "Separable two-layer temporal ERGMs for dynamic signed networks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a signed panel.
    Simulate,
    /// Fit the sign and/or interaction posteriors.
    Fit,
    /// Posterior predictive check from fitted chains.
    Ppc,
    /// ESS and autocorrelation of fitted chains.
    Diagnose,
    /// Simulate the two-wave study and fit it.
    Recover,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Fit => Command::Fit,
        Cmd::Ppc => Command::Ppc,
        Cmd::Diagnose => Command::Diagnose,
        Cmd::Recover => Command::Recover,
    };
    let ov = Overrides { seed: cli.seed, out: cli.out, threads: cli.threads };
    match run(command, cli.config.as_deref(), &ov) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code() as u8)
        }
    }
}
