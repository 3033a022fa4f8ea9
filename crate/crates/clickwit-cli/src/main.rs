//! Command-line surface for the clickwit toolkit: generate threshold curves,
//! simulate sources against them, fit power laws, classify statistics, and
//! emit the canonical figure data sets.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 1 numerical failure, 2 usage error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<clickwit::Error> for CliError {
    fn from(e: clickwit::Error) -> Self {
        match e {
            clickwit::Error::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o error: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "clickwit",
    version,
    about = "Variable nonclassicality thresholds from click statistics on small linear-optical layouts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the classical threshold curve of a layout and write it as CSV.
    Threshold(ThresholdArgs),
    /// Sweep a source parameter and classify each point against a curve.
    Simulate(SimulateArgs),
    /// Fit a power law to a stored curve inside an error-probability window.
    Fit(FitArgs),
    /// Classify a single (P_s, P_e) pair against a stored curve.
    Classify(ClassifyArgs),
    /// Emit a canonical figure data set (curve families, approximations,
    /// source trajectories, ratio tables).
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    /// Unbalanced beam splitter, two detectors.
    Bs,
    /// Mach-Zehnder interferometer, two detectors.
    Mz,
    /// Pair interference with a split output, three detectors.
    Hom,
    /// Two copies routed to their own detectors with a shared monitor port.
    Twocopy,
}

#[derive(Args, Clone, Debug, Default)]
pub struct LayoutOpts {
    /// Layout kind.
    #[arg(long, value_enum)]
    pub(crate) layout: Option<LayoutArg>,
    /// Transmission of a single-splitter layout (alias for --t1).
    #[arg(long)]
    pub(crate) t: Option<f64>,
    /// First beam-splitter transmission.
    #[arg(long)]
    pub(crate) t1: Option<f64>,
    /// Second beam-splitter transmission.
    #[arg(long)]
    pub(crate) t2: Option<f64>,
    /// Internal interferometer phase in radians (Mach-Zehnder only).
    #[arg(long)]
    pub(crate) phase: Option<f64>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct SourceOpts {
    /// Emission/collection efficiency of each copy.
    #[arg(long)]
    pub(crate) eta: Option<f64>,
    /// Mean background photons per copy.
    #[arg(long)]
    pub(crate) nbar: Option<f64>,
    /// Signal visibility in the interferometer (1 = monochromatic).
    #[arg(long)]
    pub(crate) coherence: Option<f64>,
    /// Noise visibility in the interferometer (0 = broadband).
    #[arg(long)]
    pub(crate) noise_coherence: Option<f64>,
    /// Mode overlap of the two copies (two-copy layouts).
    #[arg(long)]
    pub(crate) indist: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    layout: LayoutOpts,
    /// Smallest witness-penalty magnitude |a|.
    #[arg(long)]
    a_min: Option<f64>,
    /// Largest witness-penalty magnitude |a|.
    #[arg(long)]
    a_max: Option<f64>,
    /// Number of log-spaced sweep points.
    #[arg(long)]
    a_points: Option<usize>,
    /// Trapezoid nodes for phase averaging.
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// Output CSV path (a JSON sidecar lands next to it).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Eta,
    Nbar,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    layout: LayoutOpts,
    #[command(flatten)]
    source: SourceOpts,
    /// Curve CSV produced by `threshold`.
    #[arg(long)]
    curve: Option<std::path::PathBuf>,
    /// Which source parameter to sweep.
    #[arg(long, value_enum)]
    sweep: Option<SweepVar>,
    /// Lower sweep bound (log spacing).
    #[arg(long)]
    sweep_min: Option<f64>,
    /// Upper sweep bound.
    #[arg(long)]
    sweep_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    sweep_points: Option<usize>,
    /// Output CSV path (a JSON sidecar lands next to it).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Curve CSV produced by `threshold`.
    #[arg(long)]
    curve: std::path::PathBuf,
    /// Lower edge of the error-probability window.
    #[arg(long, default_value_t = 1e-8)]
    pe_min: f64,
    /// Upper edge of the error-probability window.
    #[arg(long, default_value_t = 1e-4)]
    pe_max: f64,
    /// Largest acceptable relative fit deviation.
    #[arg(long, default_value_t = 0.05)]
    max_residual: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Curve CSV produced by `threshold`.
    #[arg(long)]
    curve: std::path::PathBuf,
    /// Measured success probability.
    #[arg(long)]
    ps: f64,
    /// Measured error probability.
    #[arg(long)]
    pe: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[allow(clippy::enum_variant_names)]
pub enum FigureId {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig4c,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Figure data set to emit.
    #[arg(long, value_enum)]
    figure: FigureId,
    /// Directory for the emitted CSV files.
    #[arg(long)]
    out_dir: std::path::PathBuf,
    /// Trapezoid nodes for phase averaging.
    #[arg(long, default_value_t = clickwit::DEFAULT_QUAD_NODES)]
    quad_nodes: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Threshold(args) => commands::threshold(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Fit(args) => commands::fit(args),
        Command::Classify(args) => commands::classify(args),
        Command::Reproduce(args) => commands::reproduce(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
