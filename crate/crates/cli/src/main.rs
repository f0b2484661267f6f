use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uiwd_cli::demo::run_eis_demo;
use uiwd_cli::{run, run_probe_only, Metric, RunError, RunManifest};

#[derive(Parser)]
#[command(
    name = "uiwd",
    version,
    about = "Six-factor wealth allocation scenarios, probes and EIS demo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trajectory, metrics summary and probe reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated: rates, mrijs, eis, savings-utility, probes.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<Metric>>,
        /// Contiguous folds for the EIS dispersion.
        #[arg(long, default_value_t = 4)]
        folds: usize,
    },
    /// Run only the property probes.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare EIS estimates on oracle data and on allocation-generated data.
    EisDemo {
        /// Defaults to the shipped demo scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 4)]
        folds: usize,
    },
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            metrics,
            folds,
        } => {
            let manifest = RunManifest {
                metrics: metrics.unwrap_or_else(|| Metric::DEFAULT.to_vec()),
                seed,
                eis_folds: folds,
                ..RunManifest::new(config, out)
            };
            let outcome = run(&manifest)?;
            for p in [&outcome.trajectory, &outcome.summary, &outcome.probes] {
                println!("wrote {}", p.display());
            }
        }
        Command::Probe { config, out, seed } => {
            let (path, reports) = run_probe_only(&config, &out, seed)?;
            for r in &reports {
                println!(
                    "{:<13} {} evidence={}",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.evidence
                );
            }
            println!("wrote {}", path.display());
        }
        Command::EisDemo {
            config,
            out,
            seed,
            folds,
        } => {
            let (path, report) = run_eis_demo(config.as_deref(), &out, seed, folds)?;
            print!("{}", report.render());
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
