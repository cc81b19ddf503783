//! The four-stage decomposition: changepoints → anomalies → trend → seasonal.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::anomaly::{self, Detection};
use crate::changepoint::{self, PenaltyPolicy};
use crate::config::{ChangepointMethod, PipelineConfig};
use crate::error::{Error, Result, Stage};
use crate::model::{
    check_period, AnomalyMethod, AnomalyReport, ChangepointSet, DecompositionResult, Model,
    Summary, TimeSeries, VarianceShare,
};
use crate::seasonal;
use crate::smoothing::{self, Smoother};
use crate::stats;

/// Receives each stage's input just before the stage runs.
pub trait StageObserver {
    fn observe(&mut self, stage: Stage, input: &[f64]);
}

struct NoObserver;

impl StageObserver for NoObserver {
    fn observe(&mut self, _: Stage, _: &[f64]) {}
}

/// Stage 1 output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangepointOutcome {
    pub changepoints: ChangepointSet,
    /// β used by PELT or binary segmentation.
    pub penalty: Option<f64>,
}

/// Stage 1: changepoints on the raw values.
pub fn detect_changepoints(values: &[f64], config: &PipelineConfig) -> Result<ChangepointOutcome> {
    let n = values.len();
    let m = config.min_segment_length;
    let policy = PenaltyPolicy::from(config.penalty);
    let tag = |e: Error| e.at(Stage::Changepoint, None);
    Ok(match config.changepoint_method {
        ChangepointMethod::None => ChangepointOutcome {
            changepoints: ChangepointSet::empty(n),
            penalty: None,
        },
        ChangepointMethod::Pelt => {
            let seg = changepoint::detect_pelt(values, policy, m).map_err(tag)?;
            ChangepointOutcome {
                changepoints: seg.changepoints,
                penalty: Some(seg.penalty),
            }
        }
        ChangepointMethod::Binseg => {
            let max_breaks = config.max_breaks.unwrap_or(n / m.max(1));
            let seg = changepoint::detect_binseg(values, policy, m, max_breaks).map_err(tag)?;
            ChangepointOutcome {
                changepoints: seg.changepoints,
                penalty: Some(seg.penalty),
            }
        }
        ChangepointMethod::Cusum => ChangepointOutcome {
            changepoints: changepoint::detect_cusum(values, config.cusum_critical_value, m)
                .map_err(tag)?,
            penalty: None,
        },
    })
}

/// Runs the configured detector on one segment. Segments too short for the
/// detector are left unflagged; the rolling-median window shrinks to fit.
fn detect_segment(values: &[f64], config: &PipelineConfig) -> Result<Detection> {
    let threshold = config.resolved_threshold();
    let quiet = || Detection {
        flags: vec![false; values.len()],
        scores: vec![0.0; values.len()],
        threshold,
    };
    match config.anomaly_method {
        AnomalyMethod::None => Ok(quiet()),
        _ if values.len() < 3 => Ok(quiet()),
        AnomalyMethod::Zscore => anomaly::detect_zscore(values, threshold),
        AnomalyMethod::Mad => anomaly::detect_mad(values, threshold),
        AnomalyMethod::RollingMedian => {
            let mut window = config.resolved_window().min(values.len());
            if window.is_multiple_of(2) {
                window -= 1;
            }
            anomaly::detect_rolling_median(values, window, threshold)
        }
    }
}

/// Stage 2: per-segment detection on raw values, the anomaly cap, then the
/// replacement policy applied within each segment.
pub fn detect_anomalies(
    values: &[f64],
    changepoints: &ChangepointSet,
    config: &PipelineConfig,
) -> Result<(AnomalyReport, Vec<f64>)> {
    let n = values.len();
    let mut flags = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    let segments = changepoints.segments();
    for seg in &segments {
        let det = detect_segment(&values[seg.range()], config)
            .map_err(|e| e.at(Stage::Anomaly, Some(seg.id)))?;
        flags.extend(det.flags);
        scores.extend(det.scores);
    }

    let count = flags.iter().filter(|&&f| f).count();
    let cap = (config.max_anomaly_fraction * n as f64).ceil() as usize;
    if count > cap {
        return Err(Error::TooManyAnomalies {
            count,
            cap,
            fraction: config.max_anomaly_fraction,
            n,
        }
        .at(Stage::Anomaly, None));
    }

    let mut cleaned = Vec::with_capacity(n);
    let mut replacements = BTreeMap::new();
    for seg in &segments {
        let (part, reps) =
            anomaly::apply_policy(&values[seg.range()], &flags[seg.range()], config.anomaly_policy)
                .map_err(|e| e.at(Stage::Anomaly, Some(seg.id)))?;
        cleaned.extend(part);
        replacements.extend(reps.into_iter().map(|(i, v)| (i + seg.start, v)));
    }

    let report = AnomalyReport {
        flags,
        scores,
        method: config.anomaly_method,
        replacements,
        threshold_used: if config.anomaly_method == AnomalyMethod::None {
            0.0
        } else {
            config.resolved_threshold()
        },
    };
    Ok((report, cleaned))
}

/// Runs all four stages with the default (no-op) observer.
pub fn decompose_structural(
    series: &TimeSeries,
    config: &PipelineConfig,
) -> Result<DecompositionResult> {
    decompose_structural_observed(series, config, &mut NoObserver)
}

/// Runs all four stages, reporting each stage's input to `observer`.
///
/// The period comes from `config.period`, falling back to the series' own.
pub fn decompose_structural_observed(
    series: &TimeSeries,
    config: &PipelineConfig,
    observer: &mut dyn StageObserver,
) -> Result<DecompositionResult> {
    let mut config = config.clone();
    config.period = config.period.or(series.period());
    config
        .validate()
        .map_err(|e| e.at(Stage::Validation, None))?;
    let config = config.resolve();
    let n = series.len();
    if let Some(p) = config.period {
        check_period(p, n).map_err(|e| e.at(Stage::Validation, None))?;
    }
    let raw = series.values();
    let mut timings = Vec::with_capacity(4);

    let clock = Instant::now();
    observer.observe(Stage::Changepoint, raw);
    let cp = detect_changepoints(raw, &config)?;
    timings.push((Stage::Changepoint, clock.elapsed().as_secs_f64() * 1e3));

    let clock = Instant::now();
    observer.observe(Stage::Anomaly, raw);
    let (anomalies, cleaned) = detect_anomalies(raw, &cp.changepoints, &config)?;
    timings.push((Stage::Anomaly, clock.elapsed().as_secs_f64() * 1e3));

    if config.model == Model::Multiplicative {
        if let Some(i) = cleaned.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveValueForMultiplicative(i).at(Stage::Validation, None));
        }
    }

    // Multiplicative models are smoothed and decomposed in log space.
    let clock = Instant::now();
    let smoother = Smoother::from_kind(
        config.smoother,
        config.span,
        config.robustness_iterations,
        config.resolved_window(),
        config.lambda,
    );
    let trend = match config.model {
        Model::Additive => {
            observer.observe(Stage::Smoothing, &cleaned);
            smoothing::smooth_segmented(&cleaned, &cp.changepoints, smoother)?
        }
        Model::Multiplicative => {
            let logged: Vec<f64> = cleaned.iter().map(|v| v.ln()).collect();
            observer.observe(Stage::Smoothing, &logged);
            smoothing::smooth_segmented(&logged, &cp.changepoints, smoother)?
                .into_iter()
                .map(f64::exp)
                .collect()
        }
    };
    timings.push((Stage::Smoothing, clock.elapsed().as_secs_f64() * 1e3));

    let clock = Instant::now();
    let detrended: Vec<f64> = match config.model {
        Model::Additive => cleaned.iter().zip(&trend).map(|(y, t)| y - t).collect(),
        Model::Multiplicative => cleaned
            .iter()
            .zip(&trend)
            .map(|(y, t)| y.ln() - t.ln())
            .collect(),
    };
    observer.observe(Stage::Seasonal, &detrended);
    let components = seasonal::decompose_components(&cleaned, &trend, config.period, config.model)
        .map_err(|e| e.at(Stage::Seasonal, None))?;
    timings.push((Stage::Seasonal, clock.elapsed().as_secs_f64() * 1e3));

    let summary = Summary {
        n,
        segment_count: cp.changepoints.len() + 1,
        changepoint_count: cp.changepoints.len(),
        anomaly_count: anomalies.count(),
        variance_share: variance_share(&cleaned, &components, config.model),
        penalty_used: cp.penalty,
        stage_timings_ms: timings,
    };

    Ok(DecompositionResult {
        observed: raw.to_vec(),
        cleaned,
        trend: components.trend,
        seasonal: components.seasonal,
        residual: components.residual,
        model: config.model,
        changepoints: cp.changepoints,
        anomalies,
        config_echo: config,
        summary,
    })
}

fn variance(values: &[f64]) -> f64 {
    let sd = stats::population_sd(values);
    sd * sd
}

fn variance_share(cleaned: &[f64], c: &seasonal::Components, model: Model) -> VarianceShare {
    let (y, t, s, r): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = match model {
        Model::Additive => (
            cleaned.to_vec(),
            c.trend.clone(),
            c.seasonal.clone(),
            c.residual.clone(),
        ),
        Model::Multiplicative => {
            let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
            (ln(cleaned), ln(&c.trend), ln(&c.seasonal), ln(&c.residual))
        }
    };
    let total = variance(&y);
    if total == 0.0 {
        return VarianceShare {
            trend: 0.0,
            seasonal: 0.0,
            residual: 0.0,
        };
    }
    VarianceShare {
        trend: variance(&t) / total,
        seasonal: variance(&s) / total,
        residual: variance(&r) / total,
    }
}
