//! Precision analysis of two-mode N-photon probes for SU(2) estimation:
//! path scans, Haar-random searches, state classification, bound tables,
//! and the numerical verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use su2fisher_cli::{
    bounds_csv, run_bounds, run_classify, run_haar_search, run_path_scan, run_verify, scan_csv,
    to_json,
};

#[derive(Parser)]
#[command(
    name = "su2fisher",
    about = "Fisher-information precision analysis for two-mode photonic SU(2) estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep tr(F^-1) along one of the five parameter paths
    PathScan {
        /// State spec: noon:N | hb:N | fock:M,N | yurke:N | custom:c0,...
        #[arg(long)]
        state: String,
        /// Path index 1..5
        #[arg(long)]
        path: u8,
        /// Lambda grid step over [0, 1]
        #[arg(long, default_value_t = 0.005)]
        grid_step: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize tr(F^-1) over Haar-random unitaries
    HaarSearch {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Saturation/optimality classification, protocol QFI, and bound table
    Classify {
        #[arg(long)]
        state: String,
        /// Optional unitary (euler:p1,p2,p3 | abcd:a,b,c,d) at which the
        /// photon-counting precision is also reported
        #[arg(long)]
        unitary: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-precision bounds for every protocol at photon number N
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical property suites; exits 2 on failure
    Verify {
        /// oracle | two-design | uniqueness | transform | drift | all
        #[arg(long, default_value = "all")]
        scope: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random trials per uniqueness search
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::PathScan {
            state,
            path,
            grid_step,
            format,
            out,
        } => {
            let rows = match run_path_scan(&state, path, grid_step) {
                Ok(rows) => rows,
                Err(e) => return fail(e),
            };
            let text = match format {
                Format::Csv => scan_csv(&rows),
                Format::Json => to_json(&rows),
            };
            if let Err(e) = emit(&text, &out) {
                return fail(e);
            }
            ExitCode::SUCCESS
        }
        Command::HaarSearch {
            state,
            trials,
            seed,
            format,
            out,
        } => {
            if format == Format::Csv {
                return fail("haar-search emits JSON only");
            }
            let record = match run_haar_search(&state, trials, seed) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = emit(&to_json(&record), &out) {
                return fail(e);
            }
            ExitCode::SUCCESS
        }
        Command::Classify {
            state,
            unitary,
            format,
            out,
        } => {
            if format == Format::Csv {
                return fail("classify emits JSON only");
            }
            let (record, warning) = match run_classify(&state, unitary.as_deref()) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Some(w) = warning {
                eprintln!("warning: {w}");
            }
            if let Err(e) = emit(&to_json(&record), &out) {
                return fail(e);
            }
            ExitCode::SUCCESS
        }
        Command::Bounds { n, format, out } => {
            let bounds = match run_bounds(n) {
                Ok(b) => b,
                Err(e) => return fail(e),
            };
            let text = match format {
                Format::Csv => bounds_csv(&bounds),
                Format::Json => to_json(&bounds),
            };
            if let Err(e) = emit(&text, &out) {
                return fail(e);
            }
            ExitCode::SUCCESS
        }
        Command::Verify {
            scope,
            seed,
            trials,
            out,
        } => {
            let report = match run_verify(&scope, seed, trials) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = emit(&to_json(&report), &out) {
                return fail(e);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    run(cli)
}
