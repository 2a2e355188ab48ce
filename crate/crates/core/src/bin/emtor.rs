use clap::{Parser, Subcommand};
use emtor::harness::{self, EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, EXIT_SUITE};
use emtor::record::RunStatus;
use emtor::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Pseudo-spectral two-fluid Euler-Maxwell solver on the periodic torus,
/// with Littlewood-Paley / Besov diagnostics.
#[derive(Parser)]
#[command(name = "emtor", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run from a TOML config; writes series, snapshots, reports
    /// and a manifest into the output directory.
    Run {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the output directory (also: EMTOR_OUTPUT_DIR).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Re-analyze an existing run directory (no re-run needed).
    Analyze {
        /// Run directory produced by `emtor run`.
        run_dir: PathBuf,
        /// Decay-channel regularity offset ε.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Dissipation weight μ₀ in the energy ratio.
        #[arg(long, default_value_t = 0.1)]
        mu0: f64,
        /// Time windows [0, T] for the energy report (repeatable);
        /// default: the full horizon.
        #[arg(long = "window")]
        windows: Vec<f64>,
    },
    /// Run property-check suites (calibrate-then-assert with seeded RNG).
    Check {
        /// Comma-separated suite names; default: all.
        /// Available: partition, bernstein, embed, product, composition,
        /// commutator, poincare, convergence.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Grid points per axis for the field-based suites.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Calibration/fresh trial count per checker.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the verdict JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidGrid(_) => EXIT_CONFIG as u8,
        Error::BlowUp { .. } => EXIT_BLOWUP as u8,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir } => {
            match harness::cmd_run(&config, output_dir.as_deref()) {
                Ok((dir, record, code)) => {
                    match &record.status {
                        RunStatus::Completed => {
                            println!("run completed: t = {}, outputs in {}", record.t_final(), dir.display());
                        }
                        RunStatus::Tripped { reason, t_sym } => {
                            println!(
                                "run tripped ({reason:?}) at t_sym = {t_sym}; blow-up criterion integral = {}; partial outputs in {}",
                                record.monitor.blowup_integral,
                                dir.display()
                            );
                        }
                    }
                    ExitCode::from(code as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_for(&e))
                }
            }
        }
        Command::Analyze {
            run_dir,
            eps,
            mu0,
            windows,
        } => match harness::cmd_analyze(&run_dir, eps, mu0, &windows) {
            Ok(()) => {
                println!("reports written to {}", run_dir.display());
                ExitCode::from(EXIT_OK as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_for(&e))
            }
        },
        Command::Check {
            suite,
            grid,
            trials,
            out,
        } => match harness::cmd_check(&suite, grid, trials) {
            Ok(outcomes) => {
                print!("{}", harness::verdict_table(&outcomes));
                if let Some(path) = out {
                    match serde_json::to_string_pretty(&outcomes) {
                        Ok(json) => {
                            if let Err(e) = std::fs::write(&path, json) {
                                eprintln!("error writing {}: {e}", path.display());
                                return ExitCode::from(1);
                            }
                        }
                        Err(e) => {
                            eprintln!("error serializing verdicts: {e}");
                            return ExitCode::from(1);
                        }
                    }
                }
                if outcomes.iter().all(|o| o.passed) {
                    ExitCode::from(EXIT_OK as u8)
                } else {
                    ExitCode::from(EXIT_SUITE as u8)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_for(&e))
            }
        },
    }
}
