//! `psg`: Wigner surfaces, cat fidelities, negativity thresholds and the
//! oracle verification suite for photon-subtracted squeezed states.

mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use psg_core::PsgError;

use args::{ConventionArg, DetectorArg, Range};

pub const DEFAULT_EXP2S: f64 = 2.36;

#[derive(Debug, Parser)]
#[command(name = "psg", version, about = "Photon-subtracted squeezed states in phase space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wigner function of the heralded state on a square grid (CSV).
    Wigner(WignerArgs),
    /// Fidelity with the odd cat state over a range of transmittivities (CSV).
    Fidelity(FidelityArgs),
    /// Negativity thresholds in transmittivity and homodyne efficiency (JSON).
    Thresholds(ThresholdsArgs),
    /// Cross-check the analytic results against the Fock-space oracle.
    Verify(VerifyArgs),
}

/// Detector and imperfection flags shared by `wigner` and `fidelity`.
#[derive(Debug, Args)]
pub struct PipelineFlags {
    #[arg(long, value_enum, default_value = "threshold")]
    pub detector: DetectorArg,
    /// Homodyne efficiency in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Modal purity in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, value_enum, default_value = "physical")]
    pub convention: ConventionArg,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    /// Anti-squeezed variance exp(2s) of the input.
    #[arg(long, default_value_t = DEFAULT_EXP2S)]
    pub exp2s: f64,
    /// Thermal photon number of the input.
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Beam-splitter transmittivity.
    #[arg(long = "T", default_value_t = 0.88)]
    pub t: f64,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Grid `xmin:xmax:n`, shared by both axes.
    #[arg(long, default_value = "-3:3:61", allow_hyphen_values = true)]
    pub grid: Range,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long, default_value_t = DEFAULT_EXP2S)]
    pub exp2s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Transmittivities `lo:hi:n`.
    #[arg(long = "T-range", default_value = "0.8:0.999:21")]
    pub t_range: Range,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Maximize over the cat amplitude (the default when --alpha is absent).
    #[arg(long, conflicts_with = "alpha")]
    pub optimize_alpha: bool,
    /// Fixed cat amplitude.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Upper end of the amplitude search.
    #[arg(long, default_value_t = psg_core::cat::DEFAULT_ALPHA_MAX)]
    pub alpha_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    /// Width A = 4<P^2> of the input.
    #[arg(long = "A", requires = "b", conflicts_with_all = ["exp2s", "nbar"])]
    pub a: Option<f64>,
    /// Width B = 4<X^2> of the input.
    #[arg(long = "B", requires = "a")]
    pub b: Option<f64>,
    /// Anti-squeezed variance exp(2s); 2.36 unless --A/--B are given.
    #[arg(long)]
    pub exp2s: Option<f64>,
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Transmittivity at which to report the minimal homodyne efficiency.
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fock truncation dimension.
    #[arg(long, default_value_t = psg_core::fock::DEFAULT_DIM)]
    pub dim: usize,
    /// Second dimension for the convergence check; 0 skips it.
    #[arg(long, default_value_t = 60)]
    pub convergence_dim: usize,
    /// Seed for the random evaluation points.
    #[arg(long, default_value_t = psg_core::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(PsgError),
    Io(String),
    Usage(String),
}

impl From<PsgError> for CliError {
    fn from(e: PsgError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Io(msg) | CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                PsgError::InvalidParameter { .. } | PsgError::Unphysical { .. } | PsgError::DegenerateSplitter { .. } => 2,
                PsgError::ZeroProbabilityHerald { .. } => 3,
                PsgError::NotSqueezedInput { .. } => 4,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PSG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("PSG_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    init_threads()?;
    match &cli.command {
        Command::Wigner(a) => commands::wigner(a).map(|_| true),
        Command::Fidelity(a) => commands::fidelity(a).map(|_| true),
        Command::Thresholds(a) => commands::thresholds(a).map(|_| true),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("psg: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
