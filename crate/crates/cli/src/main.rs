use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcsk_wpt_cli::{check, run, CliError, RunOptions, Severity};

#[derive(Parser)]
#[command(name = "dcsk-wpt", version, about = "Harvested-power sweeps for DCSK wireless power transfer")]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every sweep point and write <name>.csv and <name>.manifest.json.
    Run {
        config: PathBuf,
        /// Dotted-path assignments such as channel.tau=0.
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory (default: output.dir from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Monte-Carlo worker threads; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Report invariant violations without running anything.
    Validate {
        config: PathBuf,
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("dcsk-wpt: {e}");
    if let CliError::Invalid(diags) = e {
        for d in diags {
            eprintln!("  {d}");
        }
    }
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run { config, overrides, out, seed, trials, workers } => {
            let opts = RunOptions { overrides, out_dir: out, seed, trials, workers };
            match run(&config, &opts) {
                Ok(summary) => {
                    for d in &summary.warnings {
                        eprintln!("{d}");
                    }
                    println!(
                        "{} rows ({} failed) -> {}",
                        summary.rows,
                        summary.failed_rows,
                        summary.csv.display()
                    );
                    println!("manifest -> {}", summary.manifest.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config, overrides } => match check(&config, &overrides) {
            Ok(diags) => {
                for d in &diags {
                    println!("{d}");
                }
                if diags.iter().any(|d| d.severity == Severity::Error) {
                    ExitCode::from(3)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => fail(&e),
        },
    }
}
