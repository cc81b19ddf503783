use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use strucdecomp::{
    AnomalyMethod, AnomalyPolicy, ChangepointMethod, Model, Penalty, PipelineConfig, SmootherKind,
};

#[derive(Debug, Parser)]
#[command(name = "strucdecomp", version, about = "Structural time-series decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write components
    Decompose(DecomposeArgs),
    /// Run changepoint detection only
    Breakpoints(StageArgs),
    /// Run changepoint and anomaly detection
    Anomalies(StageArgs),
    /// Score configurations against a synthetic series with known components
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV with one column (values) or two (time,value); header optional
    #[arg(long)]
    pub input: PathBuf,
    /// Interpolate interior missing values instead of rejecting them
    #[arg(long)]
    pub impute: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChangepointArg {
    Pelt,
    Binseg,
    Cusum,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnomalyArg {
    Rollmedian,
    Zscore,
    Mad,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Replace,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmootherArg {
    Lowess,
    Ma,
    Spline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Additive,
    Multiplicative,
}

impl From<ChangepointArg> for ChangepointMethod {
    fn from(a: ChangepointArg) -> Self {
        match a {
            ChangepointArg::Pelt => ChangepointMethod::Pelt,
            ChangepointArg::Binseg => ChangepointMethod::Binseg,
            ChangepointArg::Cusum => ChangepointMethod::Cusum,
            ChangepointArg::None => ChangepointMethod::None,
        }
    }
}

impl From<AnomalyArg> for AnomalyMethod {
    fn from(a: AnomalyArg) -> Self {
        match a {
            AnomalyArg::Rollmedian => AnomalyMethod::RollingMedian,
            AnomalyArg::Zscore => AnomalyMethod::Zscore,
            AnomalyArg::Mad => AnomalyMethod::Mad,
            AnomalyArg::None => AnomalyMethod::None,
        }
    }
}

impl From<SmootherArg> for SmootherKind {
    fn from(a: SmootherArg) -> Self {
        match a {
            SmootherArg::Lowess => SmootherKind::Lowess,
            SmootherArg::Ma => SmootherKind::MovingAverage,
            SmootherArg::Spline => SmootherKind::Penalized,
        }
    }
}

fn parse_penalty(s: &str) -> Result<Penalty, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Penalty::Auto);
    }
    match s.parse::<f64>() {
        Ok(b) if b.is_finite() && b >= 0.0 => Ok(Penalty::Fixed(b)),
        _ => Err(format!("expected `auto` or a non-negative number, got `{s}`")),
    }
}

/// Flags that map one-to-one onto [`PipelineConfig`] fields. Unset flags keep
/// the library defaults.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Seasonal period in samples
    #[arg(long)]
    pub period: Option<usize>,
    #[arg(long, value_enum, default_value_t = ChangepointArg::Pelt)]
    pub changepoint: ChangepointArg,
    /// `auto` or a fixed per-break penalty
    #[arg(long, value_parser = parse_penalty)]
    pub penalty: Option<Penalty>,
    /// Minimum segment length
    #[arg(long = "min-seg")]
    pub min_seg: Option<usize>,
    #[arg(long, value_enum, default_value_t = AnomalyArg::Rollmedian)]
    pub anomaly: AnomalyArg,
    /// Anomaly score threshold (default depends on the detector)
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Replace)]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = SmootherArg::Lowess)]
    pub smoother: SmootherArg,
    /// Lowess span as a fraction of the segment
    #[arg(long)]
    pub span: Option<f64>,
    /// Odd window for the moving average and rolling median
    #[arg(long)]
    pub window: Option<usize>,
    /// Penalized smoother roughness weight
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModelArg::Additive)]
    pub model: ModelArg,
}

impl ConfigArgs {
    pub fn to_config(&self) -> PipelineConfig {
        let d = PipelineConfig::default();
        PipelineConfig {
            changepoint_method: self.changepoint.into(),
            penalty: self.penalty.unwrap_or(d.penalty),
            min_segment_length: self.min_seg.unwrap_or(d.min_segment_length),
            anomaly_method: self.anomaly.into(),
            anomaly_threshold: self.threshold,
            anomaly_policy: match self.policy {
                PolicyArg::Replace => AnomalyPolicy::Replace,
                PolicyArg::Keep => AnomalyPolicy::Keep,
            },
            smoother: self.smoother.into(),
            span: self.span.unwrap_or(d.span),
            window: self.window,
            lambda: self.lambda.unwrap_or(d.lambda),
            model: match self.model {
                ModelArg::Additive => Model::Additive,
                ModelArg::Multiplicative => Model::Multiplicative,
            },
            period: self.period,
            ..d
        }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Component CSV (standard output when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON summary with the resolved configuration
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// SVG plot of the components
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StageArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// JSON output (standard output when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Synthetic spec as JSON; missing fields take their defaults
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Seed for the built-in demo spec
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Changepoint methods to compare, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pelt,binseg,cusum,none")]
    pub methods: Vec<ChangepointArg>,
    /// Break matching tolerance in samples
    #[arg(long, default_value_t = strucdecomp::bench::DEFAULT_TOLERANCE)]
    pub tolerance: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Score table (standard output when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}
