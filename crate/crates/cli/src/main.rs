//! `bifree` command-line front end.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "bifree", version, about = "Bi-free transforms, convolution and limit laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the two-variable Cauchy transform of a measure at point pairs.
    EvalG(EvalArgs),
    /// Evaluate the partial R-transform of a probability measure at point pairs.
    EvalR(EvalArgs),
    /// Bi-free convolution of two atomic probability measures.
    Convolve(ConvolveArgs),
    /// Density of a measure or of the law of a quintuple on a grid.
    Invert(InvertArgs),
    /// Bi-free Gaussian: density on a grid and optional R-transform values.
    Gaussian(GaussianArgs),
    /// Bi-free compound Poisson law: R-transform values and optional density.
    Poisson(PoissonArgs),
    /// Check a Lévy-Khintchine quintuple against its admissibility system.
    LkValidate(LkFileArgs),
    /// Split a quintuple into Gaussian, product and compound Poisson parts.
    LkDecompose(LkFileArgs),
    /// Evaluate the R-transform of a quintuple at point pairs.
    LkEval(LkEvalArgs),
    /// Central limit array with covariance `c`.
    CltDemo(CltArgs),
    /// Poisson limit array.
    PoissonDemo(PoissonDemoArgs),
    /// R-transforms of the convolution semigroup `t ↦ t·q`.
    Semigroup(SemigroupArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EvalG(_) => "eval-g",
            Command::EvalR(_) => "eval-r",
            Command::Convolve(_) => "convolve",
            Command::Invert(_) => "invert",
            Command::Gaussian(_) => "gaussian",
            Command::Poisson(_) => "poisson",
            Command::LkValidate(_) => "lk-validate",
            Command::LkDecompose(_) => "lk-decompose",
            Command::LkEval(_) => "lk-eval",
            Command::CltDemo(_) => "clt-demo",
            Command::PoissonDemo(_) => "poisson-demo",
            Command::Semigroup(_) => "semigroup",
        }
    }
}

/// Point pairs `(z, w)`, from a file and/or inline.
#[derive(Args, Debug, Serialize)]
pub struct PointArgs {
    /// File with one `z w` pair per line (`#` starts a comment).
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Inline pair such as `"i i"` or `"0.1-0.2i -0.3i"`; repeatable.
    #[arg(long = "at", value_name = "Z W", allow_hyphen_values = true)]
    pub at: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct GridArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Smoothing height of the inversion.
    #[arg(long, default_value_t = 0.05)]
    pub y: f64,
    /// Lower end of both grid axes (default: sized from the law).
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Upper end of both grid axes.
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Measure JSON file.
    pub measure: PathBuf,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvolveArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Density CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cumulant JSON destination (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct InvertArgs {
    /// Measure JSON or quintuple JSON file.
    pub input: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    /// Closed form when it exists, inversion otherwise.
    Auto,
    Closed,
    Inverted,
}

#[derive(Args, Debug, Serialize)]
pub struct GaussianArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma2: f64,
    #[arg(long, value_enum, default_value_t = DensityMethod::Auto)]
    pub method: DensityMethod,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// R-value destination when points are given (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PoissonArgs {
    /// Total rate.
    #[arg(long)]
    pub lambda: f64,
    /// Jump distribution as a measure JSON file.
    #[arg(long)]
    pub jump: PathBuf,
    #[command(flatten)]
    pub points: PointArgs,
    /// Also write the density CSV here.
    #[arg(long)]
    pub density: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LkFileArgs {
    /// Quintuple JSON file (general or compact form).
    pub quintuple: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LkEvalArgs {
    pub quintuple: PathBuf,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DemoArgs {
    /// Strictly increasing row indices.
    #[arg(long = "n", value_delimiter = ',', default_value = "100,1000,10000")]
    pub ns: Vec<u64>,
    /// Probe pairs file (default: the built-in 9-point grid).
    #[arg(long)]
    pub probes: Option<PathBuf>,
    /// Full JSON report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Summary table destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CltArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[command(flatten)]
    pub demo: DemoArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct PoissonDemoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Jump distribution file (default: δ at (1, 1)).
    #[arg(long)]
    pub jump: Option<PathBuf>,
    #[command(flatten)]
    pub demo: DemoArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SemigroupArgs {
    pub quintuple: PathBuf,
    /// Semigroup times.
    #[arg(long = "t", value_delimiter = ',', required = true)]
    pub ts: Vec<f64>,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let name = cli.command.name();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("BIFREE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("BIFREE_THREADS must be a non-negative integer, got {raw:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}
