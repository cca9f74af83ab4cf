use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rough_stat::density::DecisionRule;
use rough_stat::space::NormKind;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "rough-stat",
    version,
    about = "Rough statistical convergence of order alpha: densities, limit sets and property suites"
)]
pub struct Cli {
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub rule: RuleArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the run metadata header (version, timestamp) from JSON output.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

/// Overrides for the density decision thresholds.
#[derive(Debug, Args, Serialize)]
pub struct RuleArgs {
    /// Final ratio at or below which the density is Zero.
    #[arg(long, global = true)]
    pub tau_zero: Option<f64>,
    /// Final ratio at or above which (with a non-negative trend) the density is NonZero.
    #[arg(long, global = true)]
    pub tau_nonzero: Option<f64>,
    /// Minimum decay rate of the fitted log-log slope.
    #[arg(long, global = true)]
    pub s_min: Option<f64>,
    /// Largest final ratio accepted as Zero on a decaying trend.
    #[arg(long, global = true)]
    pub zero_level_cap: Option<f64>,
    /// Number of trailing checkpoints in the slope fit.
    #[arg(long, global = true)]
    pub fit_window: Option<usize>,
}

impl RuleArgs {
    pub fn rule(&self) -> DecisionRule {
        let d = DecisionRule::default();
        DecisionRule {
            tau_zero: self.tau_zero.unwrap_or(d.tau_zero),
            tau_nonzero: self.tau_nonzero.unwrap_or(d.tau_nonzero),
            s_min: self.s_min.unwrap_or(d.s_min),
            zero_level_cap: self.zero_level_cap.unwrap_or(d.zero_level_cap),
            fit_window: self.fit_window.unwrap_or(d.fit_window),
            ratio_floor: d.ratio_floor,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Order-alpha density verdict for an index predicate.
    Density(DensityArgs),
    /// Test rough statistical convergence of a sequence to one point.
    Converge(ConvergeArgs),
    /// Estimate the rough statistical limit set on a grid.
    Limitset(LimitSetArgs),
    /// Estimate statistical cluster points on a grid.
    Cluster(ClusterArgs),
    /// Scan for statistical boundedness of order alpha.
    Bounded(BoundedArgs),
    /// Radial projection of a sequence toward a point.
    Project(ProjectArgs),
    /// Run property suites over a corpus.
    Verify(VerifyArgs),
    /// Record limit-set diameters relative to 2r.
    ExploreDiameter(ExploreArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct HorizonArgs {
    /// Prefix length N (at least 1000).
    #[arg(long = "n", default_value_t = 1_000_000)]
    pub n: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SeqArgs {
    /// Builtin name (EX_A, CONST:<v>, ALT:<a>,<b>, NOISY2D:<c1>,<c2>, ...) or DSL text.
    #[arg(long, allow_hyphen_values = true)]
    pub seq: String,

    /// Norm on the sequence space.
    #[arg(long, default_value = "L2", value_parser = parse_norm)]
    pub norm: NormKind,
}

#[derive(Debug, Args, Serialize)]
pub struct LadderArgs {
    /// Decreasing epsilon ladder, comma-separated.
    #[arg(long = "eps", value_delimiter = ',', default_values_t = vec![0.5, 0.1, 0.02])]
    pub eps: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// Candidate grid: min:max:step per axis, comma-separated; one axis is replicated.
    #[arg(long, allow_hyphen_values = true, default_value = "-4:4:0.05")]
    pub grid: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    /// Boolean index predicate, e.g. "is_cube(n)".
    #[arg(long, allow_hyphen_values = true)]
    pub pred: String,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
    /// Also write the (n, count, ratio) table as CSV to this path.
    #[arg(long)]
    pub dump_ratios: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    /// Candidate limit, e.g. 0 or 1,2.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
    /// Write the per-epsilon (n, count, ratio) tables as CSV to this path.
    #[arg(long)]
    pub dump_ratios: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitSetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub alpha: f64,
    /// Neighbourhood radius.
    #[arg(long = "eps", default_value_t = 0.1)]
    pub eps: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub alpha: f64,
    /// Increasing thresholds M, comma-separated (default: powers of two up to N/4).
    #[arg(long, value_delimiter = ',')]
    pub m_schedule: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seq: SeqArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long)]
    pub r: f64,
    /// Order used for the convergence check of the projected sequence.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Number of leading terms to list.
    #[arg(long, default_value_t = 20)]
    pub show: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    All,
    Boundedness,
    Contiguity,
    Decomposition,
    Cluster,
    Midpoint,
    Linearity,
    Monotonicity,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 1.5)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
    /// Corpus file (`name[@norm] = expr` per line); defaults to the builtin corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExploreArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
    pub r_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
    pub alpha_list: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub horizon: HorizonArgs,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: rough_stat::Error| e.to_string())
}
