use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lelong_lab::scenario::{list_catalog, load_config, run, Overrides, EXIT_CONFIG, EXIT_FAIL};

#[derive(Parser)]
#[command(name = "lelong", version, about = "Directional Lelong-Demailly mass experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every scenario of a config and write CSV + JSON reports.
    Run {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the tolerance of every scenario.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Print the catalog of currents, weights, checks and oracles.
    ListCatalog,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::ListCatalog => {
            print!("{}", list_catalog());
            ExitCode::SUCCESS
        }
        Cmd::Run { config, jobs, seed, tol, out } => {
            let scenarios = match load_config(&config, &Overrides { seed, tol }) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("lelong: {e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            match run(&config, &scenarios, jobs, &out) {
                Ok(res) => {
                    for r in res.rows.iter().filter(|r| !r.passed()) {
                        eprintln!("{} {}: {}", r.scenario, r.check, r.verdict);
                    }
                    println!(
                        "{} rows, exit {} -> {} / {}",
                        res.rows.len(),
                        res.exit_code,
                        res.csv_path.display(),
                        res.json_path.display()
                    );
                    ExitCode::from(res.exit_code as u8)
                }
                Err(e) => {
                    eprintln!("lelong: {e}");
                    ExitCode::from(EXIT_FAIL as u8)
                }
            }
        }
    }
}
