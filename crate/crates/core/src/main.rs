use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use qutrit_cavity::scenario::{emit_figure_data, figure_series, run_scenario, MeasureSeries, ScenarioConfig, ScenarioError};

#[derive(Parser)]
#[command(name = "qutrit-cavity", version, about = "Two driven three-level atoms in a single-mode cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the measures of a scenario file over its time grid.
    Run {
        /// Scenario file (`key = value` lines).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV file, or a directory when `--figure` is given.
        #[arg(long)]
        out: PathBuf,
        /// Emit the nine per-panel files of figure 2, 3, 4 or 5 instead of a
        /// single series. Configuration and drive in the file are ignored.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=5))]
        figure: Option<u8>,
        /// Cross-check the closed-form state against direct integration.
        #[arg(long)]
        oracle_check: bool,
    },
}

fn report(s: &MeasureSeries) {
    let m = &s.summary;
    info!(
        "{} gamma={} alpha={} n_max={} rows={} norm deviation {:e}",
        m.configuration, m.gamma, m.alpha, m.n_max, m.rows, m.norm_deviation
    );
    if let Some((gt, value)) = m.max_entropy {
        info!("entropy maximum {value} at gt = {gt}");
    }
    if let Some(d) = m.oracle_deviation {
        info!("oracle deviation {d:e}");
    }
}

fn run(config: PathBuf, out: PathBuf, figure: Option<u8>, oracle_check: bool) -> Result<(), ScenarioError> {
    let mut scenario = ScenarioConfig::from_file(&config)?;
    scenario.oracle_check |= oracle_check;
    match figure {
        Some(fig) => {
            let series = figure_series(fig, &scenario)?;
            series.iter().for_each(report);
            for path in emit_figure_data(&series, fig, &out)? {
                println!("{}", path.display());
            }
        }
        None => {
            let series = run_scenario(&scenario)?;
            report(&series);
            fs::write(&out, series.to_csv()).map_err(|source| ScenarioError::Io { path: out.clone(), source })?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let Command::Run { config, out, figure, oracle_check } = cli.command;
    match run(config, out, figure, oracle_check) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
