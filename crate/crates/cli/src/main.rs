mod commands;
mod fail;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::fail::Failure;

/// Spectral computations for Sturm-Liouville problems with transmission conditions.
#[derive(Debug, Parser)]
#[command(name = "jumpsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First N eigenvalues.
    Eigs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Fixed scan step in rho (default: chosen from the asymptotic zeros).
        #[arg(long)]
        step: Option<f64>,
        /// Skip the contour count.
        #[arg(long)]
        no_verify: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues with norming constants and beta_n.
    SpectralData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sample the Weyl function m.
    Weyl {
        #[arg(long)]
        config: PathBuf,
        /// Spectral point `re,im`; repeatable.
        #[arg(long = "lambda", value_parser = io::parse_complex, allow_hyphen_values = true)]
        lambdas: Vec<Complex64>,
        /// Real parts `min,max,n` of a grid (use with --im-grid).
        #[arg(long, value_parser = io::parse_range, allow_hyphen_values = true)]
        re_grid: Option<io::Axis>,
        /// Imaginary parts `min,max,n` of a grid (use with --re-grid).
        #[arg(long, value_parser = io::parse_range, allow_hyphen_values = true)]
        im_grid: Option<io::Axis>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Compare Delta with its leading asymptotic form.
    AsymCheck {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated values of Re rho.
        #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
        rho: Vec<f64>,
        /// Im rho.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Rescale the jumps to a*b = 1 (unit weight) and emit the new config.
    Gauge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// m from two spectra (spectrum CSV files).
    TwoSpectra {
        #[arg(long)]
        primary: PathBuf,
        /// Spectrum with a Dirichlet condition at 0.
        #[arg(long)]
        secondary: PathBuf,
        #[arg(long = "lambda", value_parser = io::parse_complex, allow_hyphen_values = true, required = true)]
        lambdas: Vec<Complex64>,
        /// Pairs used (default: all).
        #[arg(long)]
        truncation: Option<usize>,
        /// Calibration point (default: -(4N)^2).
        #[arg(long, allow_hyphen_values = true)]
        calibration: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Recover unknown parameters from spectral data.
    Fit {
        /// Fit specification (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Count zeros of Delta inside a rectangle of the lambda plane.
    ContourCount {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        im_max: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("JUMPSL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Threads(format!("`{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Threads(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {f}", f.name());
            eprintln!("hint: {}", f.hint());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
