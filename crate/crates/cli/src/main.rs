//! `spectomo`: simulate, ingest and fit spectral-tomography signals, and
//! bound gate quality from the fitted spectrum.

mod commands;
mod error;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "spectomo", version, about = "Spectral tomography of noisy quantum gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a signal (or raw counts) for a channel or scenario.
    Simulate(SimulateArgs),
    /// Turn counts JSONL into a signal.
    Ingest(IngestArgs),
    /// Fit eigenvalues to a signal with the matrix-pencil method.
    Fit(FitArgs),
    /// Choose the model order by nested F-tests and fit.
    Select(SelectArgs),
    /// Gate-quality bounds from a fitted spectrum.
    Bounds(BoundsArgs),
    /// Spectral-footprint table (and optional SVG) of a fit.
    Footprint(FootprintArgs),
    /// Eigenvalue accuracy versus K, L and shot count.
    Sweep(SweepArgs),
    /// Simulate a non-Markovian scenario and fit it.
    Scenario(ScenarioArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    GaussianCz,
    Revival,
    FrameMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    ClosedForm,
    Product,
}

/// Channel given by name and parameters.
#[derive(Args, Clone, Debug, Default)]
pub struct ChannelArgs {
    /// identity, depolarizing, amplitude_damping, rx, ry, rz, cz, cnot or lindblad.
    #[arg(long)]
    pub channel: Option<String>,
    /// Rotation angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// Noise probability.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub hx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hz: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma_phi: Option<f64>,
    /// Evolution time for `lindblad`.
    #[arg(long)]
    pub tau: Option<f64>,
}

/// Scenario given by name and parameters.
#[derive(Args, Clone, Debug, Default)]
pub struct ScenarioParams {
    /// Rotation-angle standard deviation in degrees (gaussian-cz).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Starting quadrature order (gaussian-cz).
    #[arg(long)]
    pub order: Option<usize>,
    /// Mean photon number (revival).
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Step Ω·δt in radians (revival).
    #[arg(long, allow_hyphen_values = true)]
    pub omega_dt: Option<f64>,
    /// Frame-mismatch angle in degrees (frame-mismatch).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Base gate, cnot or cz (frame-mismatch).
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Channel, PTM or scenario JSON; flags are used when absent.
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioName>,
    #[command(flatten)]
    pub scenario_params: ScenarioParams,
    /// Largest sequence length.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Shots per experiment; adds shot noise.
    #[arg(long, conflicts_with = "exact")]
    pub shots: Option<u64>,
    /// Noiseless signal (the default without --shots).
    #[arg(long)]
    pub exact: bool,
    #[arg(long, env = "SPECTOMO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// SPAM maps as {"prep": <PTM>, "meas": <PTM>}.
    #[arg(long)]
    pub spam: Option<PathBuf>,
    /// Emit multinomial counts JSONL instead of a signal (needs --shots).
    #[arg(long, requires = "shots")]
    pub counts: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct IngestArgs {
    pub counts: PathBuf,
    /// Largest k to use; defaults to the largest k present.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct SelectOptions {
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    /// Defaults to the largest order the signal length supports (at most 15).
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Args, Clone)]
pub struct FitOutputs {
    /// Wild-bootstrap replicates for confidence intervals.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, env = "SPECTOMO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Fit JSON destination (stdout by default).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Footprint CSV destination.
    #[arg(long)]
    pub footprint: Option<PathBuf>,
    /// Footprint SVG destination.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct FitArgs {
    /// Signal CSV or JSON.
    pub signal: PathBuf,
    /// Pencil parameter (default K/2).
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Model order.
    #[arg(long = "N", required_unless_present = "select", conflicts_with = "select")]
    pub n: Option<usize>,
    /// Choose N by nested F-tests.
    #[arg(long)]
    pub select: bool,
    #[command(flatten)]
    pub selection: SelectOptions,
    #[command(flatten)]
    pub outputs: FitOutputs,
}

#[derive(Args)]
pub struct SelectArgs {
    pub signal: PathBuf,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[command(flatten)]
    pub selection: SelectOptions,
    #[command(flatten)]
    pub outputs: FitOutputs,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Fit JSON.
    pub fit: PathBuf,
    /// identity[:qubits], rx:<rad>, ry:<rad>, rz:<rad>, cz or cnot.
    #[arg(long, required_unless_present = "target_file", conflicts_with = "target_file")]
    pub target: Option<String>,
    /// Unitary channel JSON for the target.
    #[arg(long)]
    pub target_file: Option<PathBuf>,
    /// Largest tolerated excess of |λ| over 1.
    #[arg(long, default_value_t = 1e-6)]
    pub modulus_tolerance: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FootprintArgs {
    pub fit: PathBuf,
    /// CSV destination (stdout by default).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Channel or PTM JSON; a seeded random single-qubit channel when absent
    /// and no --channel is given.
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "K", value_delimiter = ',', default_value = "50")]
    pub k: Vec<usize>,
    #[arg(long = "L", value_delimiter = ',', default_value = "15,20,25,30,35")]
    pub l: Vec<usize>,
    /// Shots per experiment; exact signals when absent.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, env = "SPECTOMO_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScenarioArgs {
    #[arg(value_enum)]
    pub name: ScenarioName,
    #[command(flatten)]
    pub params: ScenarioParams,
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Fixed model order; F-test selection when absent.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub selection: SelectOptions,
    /// Also write the generated signal (CSV, or JSON by extension).
    #[arg(long)]
    pub signal_out: Option<PathBuf>,
    #[command(flatten)]
    pub outputs: FitOutputs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Fit(a) => commands::fit(a),
        Command::Select(a) => commands::select(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Footprint(a) => commands::footprint(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Scenario(a) => commands::scenario(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
