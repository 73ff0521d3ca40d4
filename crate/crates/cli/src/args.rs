//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "injnorm", version, about = "Bounds and estimates for injective norms of random tensors")]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Finite moment bound at a fixed or optimal k.
    Bound(BoundArgs),
    /// Large-dimension limits.
    Asymptotic(AsymptoticArgs),
    /// Average injective-norm estimates over sampled tensors.
    Estimate(EstimateArgs),
    /// Monte Carlo checks of the deterministic moment inequalities.
    Verify(VerifyArgs),
    /// Table of competing upper bounds.
    Compare(CompareArgs),
    /// Data (and optionally an SVG) for one of the reference figures.
    Figure(FigureArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Asymptotic(_) => "asymptotic",
            Command::Estimate(_) => "estimate",
            Command::Verify(_) => "verify",
            Command::Compare(_) => "compare",
            Command::Figure(_) => "figure",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    AReal,
    AComplex,
    #[value(alias = "sym")]
    S,
    #[value(alias = "sym-tilde")]
    STilde,
    BoundedRank,
}

impl ModelName {
    pub fn label(self) -> &'static str {
        match self {
            ModelName::AReal => "a-real",
            ModelName::AComplex => "a-complex",
            ModelName::S => "s",
            ModelName::STilde => "s-tilde",
            ModelName::BoundedRank => "bounded-rank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistName {
    /// Gaussian of the model's field.
    #[value(alias = "gauss")]
    Gaussian,
    Rademacher,
    /// Uniform on a symmetric interval, unit variance.
    Uniform,
    Steinhaus,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "a-complex")]
    pub model: ModelName,
    /// Shape `d1,...,dp`; repeat for several shapes. With `--p`, every value is a cubic side.
    #[arg(long)]
    pub dims: Vec<String>,
    /// Order for cubic shapes built from `--dims`.
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of rank-one terms (bounded-rank only).
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: DistName,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write the table here (plus `<PATH>.manifest.json`) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON rows instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("order").required(true).args(["k", "optimize_k"])))]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub optimize_k: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymptoticArgs {
    #[arg(long, value_enum, default_value = "a-complex")]
    pub model: ModelName,
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<usize>,
    /// Order range `a:b`, inclusive.
    #[arg(long, conflicts_with = "p")]
    pub p_range: Option<String>,
    /// Aspect ratios `η_2,...,η_p` (family A, single order).
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,
    /// Add the leading-order growth and the ratio to it.
    #[arg(long)]
    pub normalizers: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Als,
    Pga,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeName {
    None,
    /// Divide every sample by its Frobenius norm.
    Hs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "als")]
    pub method: MethodName,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 16)]
    pub realizations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    pub normalize: NormalizeName,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Add the optimal-k finite bound as a column.
    #[arg(long)]
    pub with_bound: bool,
    /// Estimate the tensor stored in this file instead of sampling.
    #[arg(long, conflicts_with_all = ["with_bound", "dump"])]
    pub load: Option<PathBuf>,
    /// Write every sampled tensor (after normalization) into this directory.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Write per-restart objective traces here as CSV.
    #[arg(long)]
    pub traces: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Model for a custom grid; the default grid mixes families.
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// Custom grid shapes, as for `bound`.
    #[arg(long)]
    pub dims: Vec<String>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Fixed moment order (default: random in 1..=4, or every k in 1..=4 on a custom grid).
    #[arg(long)]
    pub k: Option<u64>,
    /// Size of the default grid.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    /// Slack in standard errors.
    #[arg(long, default_value_t = 6.0)]
    pub slack: f64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Halve every prefactor and add a rank-one control; the run must fail.
    #[arg(long)]
    pub corrupt_prefactor: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    Gaussian,
    Rigid,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// `dinf` or `d=N`.
    #[arg(long, default_value = "dinf")]
    pub regime: String,
    #[arg(long, default_value = "3:8")]
    pub p_range: String,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: LawName,
    /// Failure probability in the Friedland-Kemp row.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Constant in the Boedihardjo row.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureName {
    /// Steinhaus entries, gradient ascent against the optimal-k bound.
    Steinhaus,
    /// Bounded rank R = 3 against its finite bound and the limit 1.
    BoundedRankSmall,
    /// Bounded rank R = 25, ALS against gradient ascent.
    BoundedRankR25,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, required = true)]
    pub p: usize,
    #[arg(long, value_enum, required = true)]
    pub normalize: NormalizeName,
    /// Cubic sides, comma separated (default: the figure's desk grid).
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Use the reference realization and restart counts. Slow.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Factor distribution for the bounded-rank figures.
    #[arg(long, value_enum)]
    pub dist: Option<DistName>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}
