use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmetro_core::protocol::Engine;

#[derive(Debug, Parser)]
#[command(name = "qmetro", version, about = "Phase estimation with squeezed vacuum under loss")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mandel Q, mode correlation J and Fisher information of the probe states.
    Table(TableArgs),
    /// Run the protocol once.
    Protocol(ProtocolArgs),
    /// Evaluate the protocol over an (n_bar, phi, eta) grid.
    Sweep(SweepArgs),
    /// Cross-check the closed forms against the Fock oracle.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Gaussian,
    Fock,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Gaussian => Engine::Gaussian,
            EngineArg::Fock => Engine::Fock,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepEngine {
    Gaussian,
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Total mean photon number inside the interferometer.
    #[arg(long = "nbar")]
    pub n_bar: f64,
    /// Also build each state in the Fock basis and compare.
    #[arg(long)]
    pub oracle: bool,
    /// Fock cutoff for every oracle row (default: chosen per state).
    #[arg(long, env = "QMETRO_DEFAULT_CUTOFF")]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("squeezing").required(true).args(["n_bar", "r"]))]
pub struct ProtocolArgs {
    /// Mean photon number of the squeezed vacuum, sinh^2 r.
    #[arg(long = "nbar", conflicts_with = "r")]
    pub n_bar: Option<f64>,
    /// Squeezing parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Phase shift in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: f64,
    /// Transmission of both loss stages.
    #[arg(long, conflicts_with_all = ["eta1", "eta2"])]
    pub eta: Option<f64>,
    /// Transmission before the anti-squeezer.
    #[arg(long, requires = "eta2")]
    pub eta1: Option<f64>,
    /// Transmission before the detector.
    #[arg(long, requires = "eta1")]
    pub eta2: Option<f64>,
    /// Fock cutoff (default: chosen from the expected photon tail).
    #[arg(long, env = "QMETRO_DEFAULT_CUTOFF")]
    pub cutoff: Option<usize>,
    #[arg(long, value_enum, default_value = "both")]
    pub engine: EngineArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl ProtocolArgs {
    pub fn etas(&self) -> (f64, f64) {
        match (self.eta, self.eta1, self.eta2) {
            (Some(eta), _, _) => (eta, eta),
            (None, Some(e1), Some(e2)) => (e1, e2),
            _ => (1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("nbar_axis").required(true).args(["n_bar", "nbar_log", "nbar_lin"]))]
pub struct SweepArgs {
    /// Explicit n_bar values.
    #[arg(long = "nbar", value_delimiter = ',', num_args = 1..)]
    pub n_bar: Vec<f64>,
    /// Log-spaced n_bar grid START:STOP:COUNT.
    #[arg(long)]
    pub nbar_log: Option<String>,
    /// Linearly spaced n_bar grid START:STOP:COUNT.
    #[arg(long)]
    pub nbar_lin: Option<String>,
    /// Phase values in radians.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub phi: Vec<f64>,
    /// Transmissions, applied to both loss stages.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
    pub eta: Vec<f64>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub engine: SweepEngine,
    /// Fock cutoff (fock engine only).
    #[arg(long, env = "QMETRO_DEFAULT_CUTOFF")]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub level: Level,
    /// Write the JSON report to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
