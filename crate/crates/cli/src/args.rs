//! Command-line arguments. Every argument struct also (de)serialises, so a
//! manifest can hold the exact resolved parameters and `rerun` can replay
//! them.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pomdp_voi::fsc::ControllerKind;
use pomdp_voi::scenarios::{SettingMode, SweepParameter};
use pomdp_voi::{CostKind, ObsMode, SolverParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pomdp-voi", version, about = "Value of information for POMDP agents under imposed policies")]
pub struct Cli {
    /// Print the resolved manifest and exit without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check a model file against every model invariant.
    Validate(ValidateArgs),
    /// Write the deterioration example as a model file.
    ExportModel(ExportArgs),
    /// Solve for the optimal α-vector set on a belief grid.
    Solve(SolveArgs),
    /// Evaluate one cost table under a solved policy's controller.
    Evaluate(EvaluateArgs),
    /// Value-of-information curve under a regulation setting.
    Voi(VoiArgs),
    /// Long-run distribution of the background-only imposed policy.
    Stationary(StationaryArgs),
    /// Fixed-setting VoI over a list of parameter values.
    Sweep(SweepArgs),
    /// Data behind one figure of the deterioration study.
    Reproduce(ReproduceArgs),
    /// Replay a manifest written by an earlier run.
    Rerun(RerunArgs),
}

/// Where the model comes from: a model file, or the deterioration example
/// with optional overrides.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SourceOpts {
    /// Model file (JSON). Defaults to the built-in deterioration example.
    #[arg(long, conflicts_with_all = ["scenario", "sigma"])]
    pub model: Option<PathBuf>,
    /// Deterioration settings (JSON); missing fields take their defaults.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Noise level of the additional observation.
    #[arg(long)]
    pub sigma: Option<f64>,
}

/// Deterioration example only, for commands that vary its parameters.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ScenarioOpts {
    /// Deterioration settings (JSON); missing fields take their defaults.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Noise level of the additional observation.
    #[arg(long)]
    pub sigma: Option<f64>,
}

/// Log-spaced grid on the no-failure segment plus the failure vertex.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SegmentGridOpts {
    /// Number of log-spaced damage probabilities on the no-failure segment.
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    /// Smallest damage probability on the grid.
    #[arg(long, default_value_t = 1e-6)]
    pub min_pdam: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridOpts {
    #[command(flatten)]
    #[serde(flatten)]
    pub segment: SegmentGridOpts,
    /// Explicit grid (JSON list of beliefs); required for models that do
    /// not have three states.
    #[arg(long)]
    pub beliefs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverOpts {
    /// Number of backups.
    #[arg(long, default_value_t = 180)]
    pub iters: usize,
    /// Pruning tolerance; candidates closer than three times this are dropped.
    #[arg(long, default_value_t = 1e-3)]
    pub prune_tol: f64,
}

impl SolverOpts {
    pub fn params(&self) -> SolverParams {
        SolverParams {
            iterations: self.iters,
            prune_tol: self.prune_tol,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutOpts {
    /// Output directory.
    #[arg(long, default_value = "pomdp-voi-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Background,
    Joint,
}

impl From<ModeArg> for ObsMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Background => ObsMode::Background,
            ModeArg::Joint => ObsMode::Joint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostsArg {
    Agent,
    Society,
}

impl From<CostsArg> for CostKind {
    fn from(c: CostsArg) -> Self {
        match c {
            CostsArg::Agent => CostKind::Agent,
            CostsArg::Society => CostKind::Society,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingArg {
    Fixed,
    Flexible,
}

impl From<SettingArg> for SettingMode {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::Fixed => SettingMode::Fixed,
            SettingArg::Flexible => SettingMode::Flexible,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssumptionArg {
    Pessimistic,
    Optimistic,
    Flow,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerArg {
    AlphaRegions,
    Grid,
}

impl From<ControllerArg> for ControllerKind {
    fn from(c: ControllerArg) -> Self {
        match c {
            ControllerArg::AlphaRegions => ControllerKind::AlphaRegions,
            ControllerArg::Grid => ControllerKind::Grid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepArg {
    Sigma,
    P12,
    RepairThreshold,
}

impl From<SweepArg> for SweepParameter {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Sigma => SweepParameter::Sigma,
            SweepArg::P12 => SweepParameter::P12,
            SweepArg::RepairThreshold => SweepParameter::RepairThreshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureArg {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    All,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scenario: ScenarioOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    /// Observation stream driving belief updates.
    #[arg(long, value_enum, default_value_t = ModeArg::Background)]
    pub mode: ModeArg,
    /// Cost table to minimise.
    #[arg(long, value_enum, default_value_t = CostsArg::Society)]
    pub costs: CostsArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    /// Observation stream of the policy and its controller.
    #[arg(long, value_enum, default_value_t = ModeArg::Background)]
    pub mode: ModeArg,
    /// Cost table the policy minimises.
    #[arg(long, value_enum, default_value_t = CostsArg::Society)]
    pub policy_costs: CostsArg,
    /// Cost table evaluated under the policy.
    #[arg(long, value_enum, default_value_t = CostsArg::Agent)]
    pub costs: CostsArg,
    /// Controller construction.
    #[arg(long, value_enum, default_value_t = ControllerArg::AlphaRegions)]
    pub controller: ControllerArg,
    /// Also write the joint chain as a dense CSV matrix.
    #[arg(long)]
    pub export_chain: bool,
    /// Rollouts checking the linear solve; 0 skips them.
    #[arg(long, default_value_t = 0)]
    pub trajectories: usize,
    /// Steps per rollout; defaults to the horizon where the discount
    /// falls below 1e-6.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Master seed for rollouts.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Start belief for rollouts, comma separated; defaults to the first
    /// state.
    #[arg(long, value_delimiter = ',')]
    pub start: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VoiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    /// Whether the imposed policy may use the additional observation.
    #[arg(long, value_enum, default_value_t = SettingArg::Fixed)]
    pub setting: SettingArg,
    /// Which VoI columns to write.
    #[arg(long, value_enum, default_value_t = AssumptionArg::All)]
    pub assumption: AssumptionArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StationaryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scenario: ScenarioOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: SegmentGridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    /// Parameter to vary.
    #[arg(long, value_enum)]
    pub parameter: SweepArg,
    /// Parameter values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReproduceArgs {
    /// Figure id.
    #[arg(long, value_enum)]
    pub figure: FigureArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: SegmentGridOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutOpts,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory; defaults to the one in the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
