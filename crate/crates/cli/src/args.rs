//! Command-line flags. Every flag is optional so that a JSON config file can
//! supply it; defaults are applied after merging.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lambda-qpt", version, about = "Quantum phase transition and geometric phase of a three-level atom-molecule model")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct GlobalArgs {
    /// JSON file whose keys mirror the long flag names (snake_case); flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<String>,
    /// Data file path; `-` writes to stdout. Defaults to `<subcommand>.<format>`.
    #[arg(long, short, global = true)]
    pub output: Option<String>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for grid evaluations (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Emit energies without dividing by rho.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub raw_units: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the Fock basis for N atoms.
    Basis(BasisArgs),
    /// Energy levels at one parameter point.
    Spectrum(SpectrumArgs),
    /// Lowest levels, gap and atomic fraction over a z grid.
    Sweep(SweepArgs),
    /// Mean-field ground state and energy derivatives over a z grid.
    Meanfield(MeanfieldArgs),
    /// Geometric phase of adiabatic loops in the coupling phase.
    Geophase(GeophaseArgs),
    /// Sampled mean-field trajectory along one loop.
    Trajectory(TrajectoryArgs),
    /// Pseudo-critical point and minimum gap for one N.
    GapMin(GapMinArgs),
    /// Gap minima over an N grid and finite-size scaling fits.
    Scaling(ScalingArgs),
    /// Ground-state fidelity between detuned and resonant models.
    Fidelity(FidelityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis(_) => "basis",
            Command::Spectrum(_) => "spectrum",
            Command::Sweep(_) => "sweep",
            Command::Meanfield(_) => "meanfield",
            Command::Geophase(_) => "geophase",
            Command::Trajectory(_) => "trajectory",
            Command::GapMin(_) => "gap-min",
            Command::Scaling(_) => "scaling",
            Command::Fidelity(_) => "fidelity",
        }
    }
}

pub fn parse_even(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if n % 2 != 0 {
        return Err(format!("atom number must be even, got {n}"));
    }
    Ok(n)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct BasisArgs {
    /// Total atom number (even).
    #[arg(long, value_parser = parse_even)]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct GridArgs {
    #[arg(long)]
    pub z_min: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long)]
    pub z_steps: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = parse_even)]
    pub n: Option<u32>,
    #[arg(long)]
    pub z: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Number of lowest levels (0 = full spectrum).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_even)]
    pub n: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct MeanfieldArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Finite-difference step in z.
    #[arg(long)]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct LoopArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Number of trajectory samples per loop.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct GeophaseArgs {
    /// One or more couplings, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub z: Option<Vec<f64>>,
    /// One or more loop periods, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub period: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: LoopArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub period: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: LoopArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct GapMinArgs {
    #[arg(long, value_parser = parse_even)]
    pub n: Option<u32>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Lower end of the search bracket.
    #[arg(long)]
    pub z_lo: Option<f64>,
    /// Upper end of the search bracket.
    #[arg(long)]
    pub z_hi: Option<f64>,
    #[arg(long)]
    pub scan_points: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct ScalingArgs {
    /// Atom numbers, comma separated (even).
    #[arg(long, value_delimiter = ',', value_parser = parse_even)]
    pub n_list: Option<Vec<u32>>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Bracket for the smallest N; later brackets follow the previous minimum.
    #[arg(long)]
    pub z_lo: Option<f64>,
    #[arg(long)]
    pub z_hi: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, Default)]
pub struct FidelityArgs {
    #[arg(long, value_parser = parse_even)]
    pub n: Option<u32>,
    /// Detuning of the compared ground state.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}
