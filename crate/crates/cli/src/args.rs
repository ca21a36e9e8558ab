use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covering::epsnet::CALIBRATED;
use serde::Serialize;

/// Covering experiments with independent certificates.
#[derive(Debug, Parser, Serialize)]
#[command(name = "covering", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Seed of the single random stream used by the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving the result file and side files.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Attempts for randomized constructions.
    #[arg(long, global = true, default_value_t = 10)]
    pub retries: usize,
    /// Grid resolution (points per side) for planar coverage checks.
    #[arg(long, global = true, default_value_t = 1000)]
    pub resolution: usize,
    /// Also write an SVG rendering.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Skip CSV side files longer than this many rows.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_rows: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Cover the sphere by N random strips and certify the cover.
    Strips(StripsArgs),
    /// Count random points in strips of half-width 1/N.
    ThinStrips(ThinStripsArgs),
    /// Point-set version: every strip holds at least one and few points.
    Dual(StripsArgs),
    /// k-fold covering of a square by translates of K.
    Kfold(KfoldArgs),
    /// Fractional covering number of L by translates of K against its bounds.
    Fraccover(FraccoverArgs),
    /// Cover K by translates of a given finite homothet family.
    CoverBody(CoverBodyArgs),
    /// Density-one covering of the unit square by a vanishing-ratio family.
    Vitali(VitaliArgs),
    /// Bounded-multiplicity covering of a disk by an unbounded-ratio family.
    Rings(RingsArgs),
    /// Epsilon-net with at most a logarithmic number of points per edge.
    Epsnet(EpsnetArgs),
    /// N points with at most C·d·ln N/ln ln N in every edge of measure 1/N.
    Lowmult(LowmultArgs),
    /// Shatter function and VC dimension against the Sauer–Shelah bound.
    Vc(VcArgs),
    /// Evaluate the closed-form bounds.
    Bounds(BoundsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Strips(_) => "strips",
            Command::ThinStrips(_) => "thin-strips",
            Command::Dual(_) => "dual",
            Command::Kfold(_) => "kfold",
            Command::Fraccover(_) => "fraccover",
            Command::CoverBody(_) => "cover-body",
            Command::Vitali(_) => "vitali",
            Command::Rings(_) => "rings",
            Command::Epsnet(_) => "epsnet",
            Command::Lowmult(_) => "lowmult",
            Command::Vc(_) => "vc",
            Command::Bounds(_) => "bounds",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StripsArgs {
    /// Number of strips.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Half-width is width_factor·ln N/N.
    #[arg(long, default_value_t = 10.0)]
    pub width_factor: f64,
    /// Net radius is net_factor·ln N/N.
    #[arg(long, default_value_t = 1.0)]
    pub net_factor: f64,
    /// Multiplicity cap is constant·ln N.
    #[arg(long, default_value_t = 100.0)]
    pub constant: f64,
    /// Uniform directions for an independent Monte Carlo cross-check.
    #[arg(long, default_value_t = 0)]
    pub mc_probes: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThinStripsArgs {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    /// Bound is constant·ln N/ln ln N.
    #[arg(long, default_value_t = 100.0)]
    pub constant: f64,
    /// Net point budget; a coarser net is used beyond it.
    #[arg(long, default_value_t = 200_000)]
    pub net_budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeShapeArg {
    Scaled,
    Eroded,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KfoldArgs {
    /// Body: square, triangle, regular:N or file:PATH (bounding box side 1).
    #[arg(long, default_value = "square")]
    pub body: String,
    #[arg(long, default_value_t = 2.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Side of the covered square.
    #[arg(long, default_value_t = 4.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.05)]
    pub gap: f64,
    #[arg(long, value_enum, default_value_t = EdgeShapeArg::Scaled)]
    pub edge_shape: EdgeShapeArg,
    #[arg(long, default_value_t = 100_000)]
    pub probes: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FraccoverArgs {
    /// Translated body K.
    #[arg(long, default_value = "square")]
    pub body: String,
    /// Covered body L.
    #[arg(long, default_value = "square")]
    pub target: String,
    /// L is scaled by this factor.
    #[arg(long, default_value_t = 3.0)]
    pub target_scale: f64,
    /// Grid pitch of the discretization.
    #[arg(long, default_value_t = 0.1)]
    pub pitch: f64,
    #[arg(long, default_value_t = 0.05)]
    pub gap: f64,
    /// Solve this hypergraph file instead of a geometric instance.
    #[arg(long)]
    pub hypergraph: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverBodyArgs {
    #[arg(long, default_value = "square")]
    pub body: String,
    /// Ratios as a comma list; `r*count` repeats r.
    #[arg(long, default_value = "0.99*34")]
    pub ratios: String,
    /// Band width of the case analysis.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VitaliArgs {
    #[arg(long, default_value = "square")]
    pub body: String,
    /// dyadic:LEVEL, invsqrt:SCALE, geometric:FIRST,FACTOR or constant:R.
    #[arg(long, default_value = "dyadic:1")]
    pub generator: String,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon0: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub residual_target: f64,
    #[arg(long, default_value_t = 10)]
    pub max_level: u32,
    #[arg(long, default_value_t = 2)]
    pub phase2_offset: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RingsArgs {
    #[arg(long, default_value = "regular:64")]
    pub body: String,
    #[arg(long, default_value = "geometric:1,2")]
    pub generator: String,
    #[arg(long, default_value_t = 50.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Treat the body as smooth when it is close enough to a disk.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub smooth: bool,
    #[arg(long, default_value_t = 100_000)]
    pub probes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceArg {
    Intervals,
    Strips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    A,
    B,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EpsnetArgs {
    #[arg(long, value_enum, default_value_t = InstanceArg::Intervals)]
    pub instance: InstanceArg,
    /// Ground size of the interval cycle.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pub variant: VariantArg,
    /// Sample-size constant; defaults to the calibrated value of the variant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Upper-target constant; defaults to the calibrated value of the variant.
    #[arg(long)]
    pub c1: Option<f64>,
    /// Strips instance: number of sphere points.
    #[arg(long, default_value_t = 400)]
    pub ground: usize,
    /// Strips instance: net radius used for the candidate directions.
    #[arg(long, default_value_t = 0.2)]
    pub net_radius: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LowmultArgs {
    /// Sample size N; edges have measure 1/N.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Ground size of the interval cycle (a multiple of N).
    #[arg(long, default_value_t = 2000)]
    pub ground: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = CALIBRATED.c_low)]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    /// All contiguous ranges of a line.
    Intervals,
    /// Windows of fixed length on a cycle.
    Arcs,
    Singletons,
    /// Independent random edges.
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VcArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Intervals)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Arcs: window length; random: number of edges.
    #[arg(long, default_value_t = 3)]
    pub size: usize,
    /// Read the hypergraph from a file instead.
    #[arg(long)]
    pub hypergraph: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Covering density used in the homothet thresholds.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Rounding bound inputs.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 8)]
    pub ground: usize,
    /// Strip count for the multiplicity caps.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Point count for the thin-strip bound.
    #[arg(long, default_value_t = 2000)]
    pub thin_n: usize,
}
