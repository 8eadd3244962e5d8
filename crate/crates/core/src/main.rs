use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qec_timing::scanlab::{
    break_even_report, format_number, optimize_repetitions, ratio_contour_grid, validate_suite,
    with_workers, write_csv, write_json, GridSpec, Record, Spacing, ValidationConfig,
};
use qec_timing::survival::{efficiency_ratio, p_survival_encoded, p_survival_single, p_timing};
use qec_timing::{NoiseParams, StorageSchedule, TimingModel};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Survival, efficiency ratio and optimal repetition count for a 5-qubit
/// code with random-time encode/decode noise. Times and rates are
/// dimensionless (scaled by the qubit frequency).
#[derive(Parser)]
#[command(name = "qec-timing", version)]
struct Cli {
    /// Emit JSON instead of CSV / plain numbers.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Storage {
    /// Isotropic decoherence rate γ.
    #[arg(long, default_value_t = 1e-5)]
    gamma: f64,
    /// Storage time T.
    #[arg(long = "time", default_value_t = 1e4)]
    time: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Single-qubit storage survival P_s, or P*_s with --encoded.
    Survival {
        #[command(flatten)]
        storage: Storage,
        #[arg(long)]
        encoded: bool,
    },
    /// Per-qubit encode/decode survival P_t under timing noise.
    Timing {
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        ted: f64,
    },
    /// Efficiency ratio R of a single correction.
    Ratio {
        #[command(flatten)]
        storage: Storage,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        ted: f64,
    },
    /// R over a τ × T_ed grid (columns: tau, ted, R, status).
    Contour {
        #[command(flatten)]
        storage: Storage,
        #[arg(long, default_value_t = 1e-4)]
        tau_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        tau_max: f64,
        #[arg(long, default_value_t = 60)]
        tau_points: usize,
        /// Logarithmic τ spacing (`--tau-log false` for linear).
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        tau_log: bool,
        #[arg(long, default_value_t = 1e-1)]
        ted_min: f64,
        #[arg(long, default_value_t = 10.0)]
        ted_max: f64,
        #[arg(long, default_value_t = 60)]
        ted_points: usize,
        /// Logarithmic T_ed spacing (`--ted-log false` for linear).
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        ted_log: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// P_N for N = 1..nmax (columns: N, P_N); prints N_opt.
    Repeat {
        #[command(flatten)]
        storage: Storage,
        #[arg(long, default_value_t = 1.0)]
        ted: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 32)]
        nmax: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// R = 1 boundary in T_ed/T at fixed τ for several γ.
    Bound {
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        #[arg(long = "time", default_value_t = 1e4)]
        time: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-5, 1e-4])]
        gammas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the oracle cross-check suite; exits non-zero on any failure.
    Validate {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        verbose: bool,
    },
}

fn spacing(log: bool) -> Spacing {
    if log {
        Spacing::Logarithmic
    } else {
        Spacing::Linear
    }
}

fn emit<R: Record>(records: &[R], json: bool, out: Option<&PathBuf>) -> CliResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if json {
        write_json(records, sink)?;
    } else {
        write_csv(records, sink)?;
    }
    Ok(())
}

fn print_value(json: bool, name: &str, value: f64) {
    if json {
        println!("{}", json!({ name: value }));
    } else {
        println!("{}", format_number(value));
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Survival { storage, encoded } => {
            let ps = p_survival_single(NoiseParams::new(storage.gamma)?, storage.time)?;
            if encoded {
                print_value(json, "P_s_encoded", p_survival_encoded(ps).value());
            } else {
                print_value(json, "P_s", ps.value());
            }
        }
        Command::Timing { tau, ted } => {
            print_value(json, "P_t", p_timing(TimingModel::new(tau)?, ted)?.value());
        }
        Command::Ratio { storage, tau, ted } => {
            let sched = StorageSchedule::single(storage.time, ted)?;
            if let Some(w) = sched.regime_warning() {
                eprintln!("warning: {w}");
            }
            let r = efficiency_ratio(
                NoiseParams::new(storage.gamma)?,
                TimingModel::new(tau)?,
                &sched,
            )?;
            print_value(json, "R", r);
        }
        Command::Contour {
            storage,
            tau_min,
            tau_max,
            tau_points,
            tau_log,
            ted_min,
            ted_max,
            ted_points,
            ted_log,
            out,
        } => {
            let taus = GridSpec::new("tau", tau_min, tau_max, tau_points, spacing(tau_log))?;
            let teds = GridSpec::new("ted", ted_min, ted_max, ted_points, spacing(ted_log))?;
            let noise = NoiseParams::new(storage.gamma)?;
            let records = with_workers(cli.threads, || {
                ratio_contour_grid(noise, storage.time, &taus, &teds)
            })?;
            emit(&records, json, out.as_ref())?;
        }
        Command::Repeat {
            storage,
            ted,
            tau,
            nmax,
            out,
        } => {
            let scan = optimize_repetitions(
                NoiseParams::new(storage.gamma)?,
                TimingModel::new(tau)?,
                storage.time,
                ted,
                nmax,
            )?;
            if scan.at_scan_edge() {
                eprintln!(
                    "warning: optimum at N = nmax = {nmax}; the maximum may lie beyond the scan"
                );
            }
            emit(&scan.table, json, out.as_ref())?;
            // Keep stdout a clean table when the table goes there.
            let summary = format!(
                "N_opt = {} (P_N = {})",
                scan.n_opt,
                format_number(scan.best())
            );
            if out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
        }
        Command::Bound {
            tau,
            time,
            gammas,
            out,
        } => {
            let report = break_even_report(TimingModel::new(tau)?, time, &gammas)?;
            emit(&report, json, out.as_ref())?;
        }
        Command::Validate {
            seed,
            samples,
            verbose,
        } => {
            let config = ValidationConfig::new(seed).with_samples(samples);
            let report = with_workers(cli.threads, || validate_suite(&config))?;
            print!("{}", report.render(verbose));
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
