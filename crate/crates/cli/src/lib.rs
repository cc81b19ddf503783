//! Command-line front end: CSV in, components, changepoints, anomalies and
//! benchmark tables out.
//!
//! Exit codes: 0 success, 1 input or validation error (including bad flags),
//! 2 internal error such as a failed write.

pub mod args;
pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;
use serde_json::json;
use strucdecomp::bench::{compare_methods, MethodScore};
use strucdecomp::pipeline::{detect_anomalies, detect_changepoints};
use strucdecomp::{
    decompose_structural, generate_synthetic, ChangepointMethod, PipelineConfig, Summary,
    SyntheticSpec, TimeSeries, TrendBreak,
};

use args::{BenchArgs, Cli, Command, DecomposeArgs, StageArgs, TableFormat};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<strucdecomp::Error> for CliError {
    fn from(e: strucdecomp::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn write_failed(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Internal(format!("cannot write {}: {e}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| write_failed(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(format!("cannot serialize JSON: {e}")))
}

/// Validates and resolves the configuration the same way the pipeline does,
/// for subcommands that run only the early stages.
fn prepare(series: TimeSeries, config: PipelineConfig) -> Result<(TimeSeries, PipelineConfig), CliError> {
    let validation = |e: strucdecomp::Error| CliError::Input(format!("validation stage: {e}"));
    let series = series.with_period(config.period).map_err(validation)?;
    config.validate().map_err(validation)?;
    Ok((series, config.resolve()))
}

#[derive(Serialize)]
struct DecomposeSummary<'a> {
    config: &'a PipelineConfig,
    summary: &'a Summary,
    breaks: &'a [usize],
    anomalies: Vec<usize>,
    reconstruction_error: f64,
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<(), CliError> {
    let series = io::read_series(&a.input.input, a.input.impute)?;
    let result = decompose_structural(&series, &a.config.to_config())?;

    let mut csv_bytes = Vec::new();
    io::write_components(&mut csv_bytes, &series, &result)
        .map_err(|e| CliError::Internal(format!("cannot format CSV: {e}")))?;
    let csv_text = String::from_utf8(csv_bytes)
        .map_err(|e| CliError::Internal(format!("cannot format CSV: {e}")))?;
    write_text(a.output.as_deref(), &csv_text)?;

    if let Some(path) = &a.json {
        let summary = DecomposeSummary {
            config: &result.config_echo,
            summary: &result.summary,
            breaks: result.changepoints.breaks(),
            anomalies: result.anomalies.flagged_indices(),
            reconstruction_error: result.reconstruction_error(),
        };
        write_text(Some(path), &to_json(&summary)?)?;
    }
    if let Some(path) = &a.plot {
        write_text(Some(path), &svg::render_components_svg(&result))?;
    }
    Ok(())
}

fn method_name(m: ChangepointMethod) -> &'static str {
    match m {
        ChangepointMethod::Pelt => "pelt",
        ChangepointMethod::Binseg => "binseg",
        ChangepointMethod::Cusum => "cusum",
        ChangepointMethod::None => "none",
    }
}

fn cmd_breakpoints(a: &StageArgs) -> Result<(), CliError> {
    let series = io::read_series(&a.input.input, a.input.impute)?;
    let (series, config) = prepare(series, a.config.to_config())?;
    let outcome = detect_changepoints(series.values(), &config)?;
    let body = json!({
        "breaks": outcome.changepoints.breaks(),
        "method": method_name(config.changepoint_method),
        "penalty": outcome.penalty,
    });
    write_text(a.output.as_deref(), &to_json(&body)?)
}

fn cmd_anomalies(a: &StageArgs) -> Result<(), CliError> {
    let series = io::read_series(&a.input.input, a.input.impute)?;
    let (series, config) = prepare(series, a.config.to_config())?;
    let outcome = detect_changepoints(series.values(), &config)?;
    let (report, _) = detect_anomalies(series.values(), &outcome.changepoints, &config)?;
    let indices = report.flagged_indices();
    let scores: Vec<f64> = indices.iter().map(|&i| report.scores[i]).collect();
    let body = json!({
        "indices": indices,
        "scores": scores,
        "method": report.method,
        "threshold": report.threshold_used,
        "breaks": outcome.changepoints.breaks(),
    });
    write_text(a.output.as_deref(), &to_json(&body)?)
}

/// Two breaks, seasonality and four spikes: enough structure for every stage
/// to matter.
pub fn demo_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        n: 300,
        base_level: 10.0,
        trend_breaks: vec![
            TrendBreak {
                index: 100,
                new_slope: 0.0,
                level_jump: 6.0,
            },
            TrendBreak {
                index: 200,
                new_slope: 0.02,
                level_jump: -5.0,
            },
        ],
        seasonal_amplitude: 2.0,
        period: Some(12),
        noise_sd: 1.0,
        spike_indices: vec![30, 75, 160, 250],
        spike_magnitude: 8.0,
        seed,
        ..Default::default()
    }
}

fn score_table_csv(rows: &[MethodScore]) -> Result<String, CliError> {
    let fail = |e: csv::Error| CliError::Internal(format!("cannot format CSV: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "config_id",
        "trend_rmse",
        "seasonal_rmse",
        "changepoint_precision",
        "changepoint_recall",
        "changepoint_f1",
        "anomaly_precision",
        "anomaly_recall",
        "runtime_ms",
        "error",
    ])
    .map_err(fail)?;
    for r in rows {
        w.write_record([
            r.config_id.clone(),
            io::fmt_num(r.trend_rmse),
            io::fmt_num(r.seasonal_rmse),
            io::fmt_num(r.changepoint_precision),
            io::fmt_num(r.changepoint_recall),
            io::fmt_num(r.changepoint_f1),
            io::fmt_num(r.anomaly_precision),
            io::fmt_num(r.anomaly_recall),
            format!("{:.3}", r.runtime_ms),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("cannot format CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let spec = match &a.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<SyntheticSpec>(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => demo_spec(a.seed),
    };
    let data = generate_synthetic(&spec)?;
    let base = a.config.to_config();
    let configs: Vec<(String, PipelineConfig)> = a
        .methods
        .iter()
        .map(|&m| {
            let method = ChangepointMethod::from(m);
            (
                method_name(method).to_string(),
                PipelineConfig {
                    changepoint_method: method,
                    ..base.clone()
                },
            )
        })
        .collect();
    let rows = compare_methods(&data, &configs, a.tolerance);
    let text = match a.format {
        TableFormat::Csv => score_table_csv(&rows)?,
        TableFormat::Json => to_json(&rows)?,
    };
    write_text(a.output.as_deref(), &text)
}

pub fn run_command(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Breakpoints(a) => cmd_breakpoints(a),
        Command::Anomalies(a) => cmd_anomalies(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run_command(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
