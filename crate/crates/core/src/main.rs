//! Command-line front end: execute config-driven sweeps, emit the built-in
//! figure presets, and run the regression anchors.

use clap::{Parser, Subcommand};
use pdc_schmidt::config;
use pdc_schmidt::run::{anchor_report, preset, run, RunError, PRESET_NAMES};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pdc-schmidt",
    version,
    about = "Schmidt number of two-photon down-conversion states"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute the sweep described by a config file
    Run {
        /// Path to a `section.key = value` config
        config: PathBuf,
    },
    /// Print (or write) a built-in figure-reproduction config
    Preset {
        /// One of: fig3a, fig4, fig5, fig6, fig7, fig8
        name: String,
        /// Write the config here instead of stdout
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Evaluate the dispersion and pump regression anchors
    Check,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run { config: path } => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            };
            let cfg = match config::parse(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run(&cfg) {
                Ok(outcome) => {
                    println!(
                        "{}: {} rows written, {} resumed",
                        outcome.csv_path.display(),
                        outcome.rows_written,
                        outcome.rows_skipped
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    report_cause_chain(&e);
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Cmd::Preset { name, emit } => {
            let Some(cfg) = preset(&name) else {
                eprintln!(
                    "error: unknown preset `{name}`; available: {}",
                    PRESET_NAMES.join(", ")
                );
                return ExitCode::from(1);
            };
            let text = config::serialize(&cfg);
            match emit {
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Some(path) => match std::fs::write(&path, text) {
                    Ok(()) => {
                        println!("wrote {}", path.display());
                        ExitCode::SUCCESS
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        ExitCode::from(1)
                    }
                },
            }
        }
        Cmd::Check => match anchor_report() {
            Ok(anchors) => {
                let mut failed = 0;
                for a in &anchors {
                    let status = if a.pass() { "PASS" } else { "FAIL" };
                    if !a.pass() {
                        failed += 1;
                    }
                    println!(
                        "[{status}] {:<24} {:>12.6e}  window [{:.6e}, {:.6e}]",
                        a.name, a.value, a.lo, a.hi
                    );
                }
                if failed == 0 {
                    println!("all {} anchors pass", anchors.len());
                    ExitCode::SUCCESS
                } else {
                    println!("{failed} of {} anchors fail", anchors.len());
                    ExitCode::from(2)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}

fn report_cause_chain(err: &RunError) {
    let mut source = std::error::Error::source(err);
    while let Some(cause) = source {
        eprintln!("  caused by: {cause}");
        source = cause.source();
    }
}
