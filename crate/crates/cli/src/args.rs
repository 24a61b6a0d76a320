use std::path::PathBuf;

use boundary_lab_core::harness::RiskColumn;
use boundary_lab_core::{BoundarySpec, EstimatorKind, FunctionalSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Simulation, estimation and verification for Poisson support-boundary models.
#[derive(Debug, Parser)]
#[command(name = "boundary-lab", version, about, propagate_version = true)]
pub struct Cli {
    /// Worker threads for Monte Carlo replication (0 = all cores).
    #[arg(long, global = true, env = "BOUNDARY_LAB_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Where to write the resolved-configuration JSON for commands that
    /// print to stdout (file outputs get `<out>.json` automatically).
    #[arg(long, global = true)]
    pub sidecar: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one sample and write it as an `x,y` CSV with a JSON sidecar.
    Simulate(SimulateArgs),
    /// Evaluate the Hölder envelope of a sample on a uniform grid (`x,ghat`).
    Envelope(EnvelopeArgs),
    /// Estimate a functional `∫Φ(g)` from a sample; prints JSON.
    Estimate(EstimateArgs),
    /// Monte Carlo risk table over an n-grid (CSV).
    Mc(McArgs),
    /// Fit the log-log slope of a risk table; prints JSON, exits 2 when off target.
    Rates(RatesArgs),
    /// Error experiment for the plug-in test (CSV of per-replication decisions).
    Test(TestArgs),
    /// χ² certificate for the bump prior; prints JSON.
    Lowerbound(LowerboundArgs),
    /// Numerical checks that exit 2 on any violation.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Closed-form rate exponents on a β grid (CSV).
    Exponents(ExponentsArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct ClassArgs {
    /// Hölder exponent β ∈ (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Hölder radius R > 0.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// Intensity scale n.
    #[arg(long)]
    pub n: u64,
    /// Boundary: `const:<v>`, `powb`, `bumps:<bits>:<c>` or `grid:<file.csv>`.
    #[arg(long, default_value = "const:0")]
    #[serde(serialize_with = "display")]
    pub g: BoundarySpec,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Truncation ceiling; defaults to `max g + 2R + cap-margin`.
    #[arg(long)]
    pub cap: Option<f64>,
    /// Extra room above the default ceiling.
    #[arg(long, default_value_t = 0.0)]
    pub cap_margin: f64,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// Sample CSV (its `.json` sidecar supplies n and the ceiling).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Number of grid nodes on [0, 1].
    #[arg(long, default_value_t = 1025)]
    pub grid: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// Sample CSV (its `.json` sidecar supplies n and the ceiling).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Functional: `power:<p>` or `const:<v>`.
    #[arg(long, default_value = "power:1")]
    #[serde(serialize_with = "label")]
    pub functional: FunctionalSpec,
    /// Quadrature nodes for `∫Φ(ĝ)`.
    #[arg(long, default_value_t = 8192)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// `fphi`, `fp` or `that`.
    #[arg(long, default_value = "fp")]
    #[serde(serialize_with = "display")]
    pub estimator: EstimatorKind,
    /// Power p of the functional `∫|g|^p`.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Functional for `fphi` (defaults to `power:<p>`).
    #[arg(long)]
    #[serde(serialize_with = "opt_label")]
    pub functional: Option<FunctionalSpec>,
    /// True boundary.
    #[arg(long, default_value = "const:1")]
    #[serde(serialize_with = "display")]
    pub g: BoundarySpec,
    /// Comma-separated, strictly increasing intensity scales.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024,2048,4096")]
    pub ns: Vec<u64>,
    /// Replications per n (at least 100).
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Quadrature nodes for `∫Φ(ĝ)`.
    #[arg(long, default_value_t = 8192)]
    pub grid: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnArg {
    Rmse,
    MeanAbsError,
}

impl From<ColumnArg> for RiskColumn {
    fn from(c: ColumnArg) -> Self {
        match c {
            ColumnArg::Rmse => RiskColumn::Rmse,
            ColumnArg::MeanAbsError => RiskColumn::MeanAbsError,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RatesArgs {
    /// Risk table CSV written by `mc`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Expected exponent e in `risk ∝ n^{−e}`.
    #[arg(long)]
    pub target_exponent: f64,
    /// Allowed |slope + e|.
    #[arg(long, default_value_t = 0.08)]
    pub tol: f64,
    /// Risk column to fit.
    #[arg(long, value_enum, default_value_t = ColumnArg::Rmse)]
    pub column: ColumnArg,
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    /// Power p of the tested norm.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    /// Separation radius r_n (defaults to 5·r_n*).
    #[arg(long)]
    pub rn: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Quadrature nodes for the statistic.
    #[arg(long, default_value_t = 8192)]
    pub grid: usize,
    /// Per-replication CSV (`hypothesis,rep,statistic,decision`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsArg {
    /// `p_k = 1/√m`.
    Uniform,
    /// `p_k ∝ ⟨Φ′∘f, K_h(· − (k−1)h)⟩₊`.
    Matched,
}

#[derive(Debug, Args, Serialize)]
pub struct LowerboundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    pub n: u64,
    /// Number of cells. Without it, `--rn` sizes the prior; without both,
    /// `m = ⌊2(cRn)^{1/(β+1)}⌋`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Target separation radius for sizing the prior.
    #[arg(long, conflicts_with = "m")]
    pub rn: Option<f64>,
    /// Power p (for `--rn` sizing and matched weights).
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Bump amplitude factor (≤ 1/4 keeps bumps in the class).
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = WeightsArg::Uniform)]
    pub weights: WeightsArg,
    /// Base boundary f.
    #[arg(long, default_value = "const:0")]
    #[serde(serialize_with = "display")]
    pub g: BoundarySpec,
    /// Monte Carlo replications (0 skips the MC branch).
    #[arg(long, default_value_t = 0)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Interpolation inequality on a certified random corpus (`case,lhs,rhs,holds`).
    Interp(InterpArgs),
    /// Grid Hölder check of a boundary.
    Holder(HolderArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InterpArgs {
    /// Corpus size.
    #[arg(long, default_value_t = 1000)]
    pub corpus: usize,
    /// Fix β (default: cycle 0.3, 0.5, 1).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Fix p (default: cycle 1, 2, 4).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HolderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    #[serde(serialize_with = "display")]
    pub g: BoundarySpec,
    #[arg(long, default_value_t = 1025)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentsArgs {
    /// Powers p.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub p: Vec<f64>,
    /// Number of β values, evenly spaced on (0, 1].
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn label<S: serde::Serializer>(v: &FunctionalSpec, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.label())
}

fn opt_label<S: serde::Serializer>(v: &Option<FunctionalSpec>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(f) => s.serialize_str(f.label()),
        None => s.serialize_none(),
    }
}
