mod commands;
mod output;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use shearbound::{ErrorKind, LambdaFit, ModelId};
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "shearbound", version, about = "Boundary shear stress prediction and uncertainty bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Predict profiles for every condition and model.
    Predict,
    /// Sweep the subset size and fit the transfer factor.
    Calibrate,
    /// Fixed 95 % bound statistics per model.
    Hbmes1,
    /// Optimized bound per sample and class averages of FOCB.
    Hbmes2,
    /// Generate a synthetic conditions and profiles pair.
    Synth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FitArg {
    Residual,
    MeasuredMarginal,
}

impl From<FitArg> for LambdaFit {
    fn from(f: FitArg) -> Self {
        match f {
            FitArg::Residual => LambdaFit::Residual,
            FitArg::MeasuredMarginal => LambdaFit::MeasuredMarginal,
        }
    }
}

#[derive(Debug, Clone, clap::Args, Serialize)]
struct Options {
    /// Conditions CSV; the built-in 23-run flume set when omitted.
    #[arg(long, global = true)]
    conditions: Option<PathBuf>,
    /// Measured profiles CSV.
    #[arg(long, global = true)]
    profiles: Option<PathBuf>,
    /// Comma-separated model ids.
    #[arg(long, global = true, value_delimiter = ',', default_value = "shannon,shannon_pl,tsallis,renyi,rho_g_r_s")]
    models: Vec<ModelId>,
    #[arg(long, global = true, default_value = "out")]
    #[serde(skip)]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 2.0)]
    q: f64,
    #[arg(long = "alpha-prime", global = true, default_value_t = 0.5)]
    alpha_prime: f64,
    /// Wall/bed junction offset in metres.
    #[arg(long = "yw-m", global = true, default_value_t = shearbound::geometry::DEFAULT_JUNCTION_OFFSET_M)]
    yw_m: f64,
    #[arg(long, global = true, default_value_t = 1000.0)]
    rho: f64,
    #[arg(long, global = true, default_value_t = 9.81)]
    g: f64,
    #[arg(long, global = true, default_value_t = shearbound::uncertainty::DEFAULT_ZETA)]
    zeta: f64,
    #[arg(long = "ss-min", global = true, default_value_t = 9)]
    ss_min: usize,
    #[arg(long = "ss-max", global = true, default_value_t = 23)]
    ss_max: usize,
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,
    /// Transfer factor; calibrated per model when omitted.
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long = "lambda-fit", global = true, value_enum, default_value_t = FitArg::Residual)]
    lambda_fit: FitArg,
    /// Grid size per sample for predict without profiles and for synth.
    #[arg(long, global = true, default_value_t = 50)]
    points: usize,
    #[arg(long = "lambda-true", global = true, default_value_t = 0.3, allow_negative_numbers = true)]
    lambda_true: f64,
    #[arg(long = "sigma-true", global = true, default_value_t = 0.1)]
    sigma_true: f64,
    /// Model used to generate synthetic data.
    #[arg(long = "synth-model", global = true, default_value = "shannon")]
    synth_model: ModelId,
}

/// Failure with the category that selects the exit status.
#[derive(Debug)]
pub struct Failure {
    kind: ErrorKind,
    message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    fn code(&self) -> u8 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Solver => 4,
        }
    }
}

impl From<shearbound::Error> for Failure {
    fn from(e: shearbound::Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<shearbound::dataset::DatasetError> for Failure {
    fn from(e: shearbound::dataset::DatasetError) -> Self {
        shearbound::Error::from(e).into()
    }
}

impl From<shearbound::uncertainty::UncertaintyError> for Failure {
    fn from(e: shearbound::uncertainty::UncertaintyError) -> Self {
        shearbound::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();
    match commands::run(cli.command, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code())
        }
    }
}
