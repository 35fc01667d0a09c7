use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "kms",
    version,
    about = "Thermal and vacuum propagators, cluster decay scans, perturbative KMS corrections and proof traces",
    after_help = "Every flag except --config can also be set in a TOML file passed with --config. \
Keys are the long flag names (e.g. `mass = 1.0`, `vanhove = \"2..5\"`, `powers = [2, 2]`, \
`negative-control = true`); flags given on the command line win.\n\n\
Exit codes: 0 ok, 2 domain or usage error, 3 numerical failure, 4 failed check or proof."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Quadrature tolerance, or the pass threshold of a check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Omit the run metadata (version, elapsed time) from JSON output.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the two-point function on a (u, r, t) grid against its quadrature.
    Propagator(PropagatorArgs),
    /// Scan a connected correlation function and fit its exponential decay.
    Cluster(ClusterArgs),
    /// Thermal mass, perturbative corrections and consistency checks.
    Kms(KmsArgs),
    /// Prove the identity corpus and replay every trace.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    Default,
    Fine,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub mass: Option<f64>,
    /// Inverse temperature; the vacuum if omitted.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PropagatorArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Translate every factor along the z axis.
    Spatial,
    /// Move the factors along the imaginary-time axis (vacuum only).
    URay,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of translated factors.
    #[arg(long)]
    pub n: Option<usize>,
    /// Wick powers of all n + 1 factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub powers: Option<Vec<u32>>,
    /// Imaginary times of the translated factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub u: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub direction: Option<Direction>,
    /// Radii as `lo..hi:step`.
    #[arg(long)]
    pub radii: Option<String>,
    /// Fit window in the Euclidean distance, `lo..hi`.
    #[arg(long)]
    pub fit_window: Option<String>,
    /// Rate of the checked bound; `mass / sqrt(n)` if omitted.
    #[arg(long)]
    pub bound_rate: Option<f64>,
    /// File for the JSON fit report in CSV mode; standard error if omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Check a bound faster than the fitted decay, which must fail.
    #[arg(long)]
    pub negative_control: bool,
}

#[derive(Debug, Args)]
pub struct KmsArgs {
    #[command(subcommand)]
    pub command: KmsCommand,
}

#[derive(Debug, Subcommand)]
pub enum KmsCommand {
    /// Coincident-point difference of thermal and vacuum two-point functions.
    ThermalMass(StateArgs),
    /// Perturbative correction to an expectation value along a van Hove sequence.
    Correct(CorrectArgs),
    /// Consistency checks with a pass/fail exit code.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Symmetric,
    Skewed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Full,
    Delta,
}

#[derive(Debug, Args)]
pub struct TermArgs {
    /// Observable at the origin: `1` or `phiK`.
    #[arg(long)]
    pub obs: Option<String>,
    /// Interaction density `phiK`, K even.
    #[arg(long = "int")]
    pub interaction: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub term: TermArgs,
    #[arg(long)]
    pub order: Option<u32>,
    /// Van Hove indices, `n` or `n1..n2`.
    #[arg(long)]
    pub vanhove: Option<String>,
    /// Relative tolerance of the van Hove convergence test.
    #[arg(long)]
    pub vanhove_tolerance: Option<f64>,
    /// Width of the switching region.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub shape: Option<Shape>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub qmc_points: Option<usize>,
    #[arg(long)]
    pub qmc_shifts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(subcommand)]
    pub command: CheckCommand,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Compare the first-order shift integral at several insertion times.
    Shift(ShiftArgs),
    /// Match vacuum and thermal Wick ordering of phi4.
    Reorder(StateArgs),
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub term: TermArgs,
    /// Van Hove index of the spatial cutoff.
    #[arg(long)]
    pub index: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub base_time: Option<f64>,
    /// Shifts added to the base time, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shifts: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Width of the switching region, a rational number.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// Co-cycle first time, a rational number; requires --s.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Co-cycle second time, a rational number; requires --t.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Prove with a deliberately broken rule table.
    #[arg(long)]
    pub corrupt_rules: bool,
}
