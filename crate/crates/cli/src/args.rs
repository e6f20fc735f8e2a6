use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "graspmc", version, about = "Sample gripper poses with annealed adaptive MCMC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic point cloud and its parametric rim curve.
    Synth(SynthArgs),
    /// Detect rim points in a point cloud.
    Rims(RimsArgs),
    /// Run one or more chains on a synthetic object.
    Sample(Box<SampleArgs>),
    /// Summarize chain history files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Object spec (JSON).
    #[arg(long, env = "GRASPMC_SPEC")]
    pub spec: PathBuf,
    /// Point cloud output.
    #[arg(long, env = "GRASPMC_OUT")]
    pub out: PathBuf,
    /// Ground-truth rim output [default: <out>.rims].
    #[arg(long, env = "GRASPMC_RIMS_OUT")]
    pub rims_out: Option<PathBuf>,
    /// Points along the ground-truth rim curve.
    #[arg(long, env = "GRASPMC_RIM_POINTS", default_value_t = 360)]
    pub rim_points: usize,
}

#[derive(Debug, Args)]
pub struct RimsArgs {
    /// Point cloud input (`x y z` per line).
    #[arg(long, env = "GRASPMC_CLOUD")]
    pub cloud: PathBuf,
    /// Neighborhood radius, m.
    #[arg(long, env = "GRASPMC_RADIUS", default_value_t = 0.015)]
    pub radius: f64,
    /// Threshold on the squared displacement sum, m^2.
    #[arg(long, env = "GRASPMC_ZETA", default_value_t = 0.005)]
    pub zeta: f64,
    #[arg(long, env = "GRASPMC_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Rw,
    Kameleon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EtaRuleArg {
    Fixed,
    Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitArg {
    None,
    Chain(PathBuf),
    Subsample(PathBuf),
}

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "none" => Ok(InitArg::None),
            Some(("chain", p)) if !p.is_empty() => Ok(InitArg::Chain(p.into())),
            Some(("subsample", p)) if !p.is_empty() => Ok(InitArg::Subsample(p.into())),
            _ => Err(format!("expected none, chain:PATH or subsample:PATH, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthArg {
    Median,
    Fixed(f64),
}

impl FromStr for BandwidthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "median" {
            return Ok(BandwidthArg::Median);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(BandwidthArg::Fixed(v)),
            _ => Err(format!("expected \"median\" or a positive number, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Object spec (JSON); the cloud is regenerated from it.
    #[arg(long, env = "GRASPMC_OBJECT")]
    pub object: PathBuf,
    /// Rim points in the generated object's frame; detected when omitted.
    #[arg(long, env = "GRASPMC_RIMS")]
    pub rims: Option<PathBuf>,
    #[arg(long, env = "GRASPMC_SAMPLER", value_enum, default_value = "kameleon")]
    pub sampler: SamplerArg,
    /// Iterations [default: 5000, or the donor's post-burn-in length with
    /// subsample init].
    #[arg(long, env = "GRASPMC_ITERS")]
    pub iters: Option<usize>,
    /// Burn-in length [default: 1000, or 0 with subsample init].
    #[arg(long, env = "GRASPMC_BURNIN")]
    pub burnin: Option<usize>,
    #[arg(long, env = "GRASPMC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// none, chain:PATH or subsample:PATH.
    #[arg(long, env = "GRASPMC_INIT", default_value = "none")]
    pub init: InitArg,
    /// History output; with several chains, `-<i>` is appended to the stem.
    #[arg(long, env = "GRASPMC_OUT")]
    pub out: PathBuf,
    /// Independent chains with seeds seed, seed+1, ...
    #[arg(long, env = "GRASPMC_CHAINS", default_value_t = 1)]
    pub chains: usize,
    /// Worker threads [default: available cores].
    #[arg(long, env = "GRASPMC_WORKERS")]
    pub workers: Option<usize>,
    /// Use T rather than 1/T as the acceptance exponent.
    #[arg(long, env = "GRASPMC_ANNEALING_LITERAL")]
    pub annealing_literal: bool,
    /// Kernel bandwidth: "median" or a fixed value.
    #[arg(long, env = "GRASPMC_BANDWIDTH", default_value = "0.5")]
    pub bandwidth: BandwidthArg,
    #[arg(long, env = "GRASPMC_ETA_RULE", value_enum, default_value = "normalized")]
    pub eta_rule: EtaRuleArg,
    /// Gradient step size under the fixed rule.
    #[arg(long, env = "GRASPMC_ETA", default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, env = "GRASPMC_SUBSAMPLE_SIZE", default_value_t = 200)]
    pub subsample_size: usize,
    #[arg(long, env = "GRASPMC_GAMMA", default_value_t = 1e-4)]
    pub gamma: f64,
    #[arg(long, env = "GRASPMC_NU", default_value_t = 2.38 / 6f64.sqrt())]
    pub nu: f64,
    #[arg(long, env = "GRASPMC_T0", default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, env = "GRASPMC_TN", default_value_t = 0.05)]
    pub tn: f64,
    /// vMF concentration of the random-walk orientation step.
    #[arg(long, env = "GRASPMC_KAPPA", default_value_t = 5.0)]
    pub kappa: f64,
    /// Per-axis variance of the random-walk position step, m^2.
    #[arg(long, env = "GRASPMC_SIGMA_POS", default_value_t = 0.01)]
    pub sigma_pos: f64,
    #[arg(long, env = "GRASPMC_RIM_RADIUS", default_value_t = 0.015)]
    pub rim_radius: f64,
    #[arg(long, env = "GRASPMC_ZETA", default_value_t = 0.005)]
    pub zeta: f64,
    /// Oracle tolerance on the rim distance, m.
    #[arg(long, env = "GRASPMC_EPS_D", default_value_t = 0.05)]
    pub eps_d: f64,
    /// Oracle tolerance on the approach angle, rad.
    #[arg(long, env = "GRASPMC_EPS_THETA", default_value_t = 0.8)]
    pub eps_theta: f64,
    #[arg(long, env = "GRASPMC_MIN_GWS", default_value_t = 0.01)]
    pub min_gws: f64,
    /// Workspace margin around the cloud's bounding box, m.
    #[arg(long, env = "GRASPMC_MARGIN", default_value_t = 0.1)]
    pub margin: f64,
    /// Sample in the generated frame instead of the canonical one.
    #[arg(long, env = "GRASPMC_NO_ALIGN")]
    pub no_align: bool,
    /// Scale donor positions before transfer.
    #[arg(long, env = "GRASPMC_TRANSFER_SCALE")]
    pub transfer_scale: Option<f64>,
    /// CSV of accepted feasible poses for plotting.
    #[arg(long, env = "GRASPMC_SCATTER")]
    pub scatter: Option<PathBuf>,
    #[command(flatten)]
    pub dedup: DedupArgs,
    /// Print the resolved sampler config and exit.
    #[arg(long, env = "GRASPMC_DRY_RUN")]
    pub dry_run: bool,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    /// Position radius for counting distinct poses, m.
    #[arg(long, env = "GRASPMC_DEDUP_POSITION", default_value_t = 0.005)]
    pub dedup_position: f64,
    /// Orientation radius for counting distinct poses, rad.
    #[arg(long, env = "GRASPMC_DEDUP_ORIENTATION", default_value_t = 0.1)]
    pub dedup_orientation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Chain history files.
    #[arg(required = true)]
    pub histories: Vec<PathBuf>,
    #[arg(long, env = "GRASPMC_FORMAT", value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub dedup: DedupArgs,
}
