//! Scoring pipeline configurations against synthetic ground truth.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::model::ChangepointSet;
use crate::pipeline::decompose_structural;
use crate::synthetic::SyntheticSeries;

pub const DEFAULT_TOLERANCE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(matches: usize, predicted: usize, truth: usize) -> Self {
        let precision = if predicted == 0 {
            if truth == 0 { 1.0 } else { 0.0 }
        } else {
            matches as f64 / predicted as f64
        };
        let recall = if truth == 0 {
            if predicted == 0 { 1.0 } else { 0.0 }
        } else {
            matches as f64 / truth as f64
        };
        Self {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Greedy one-to-one matching of breaks within `±tolerance`.
///
/// Predicted breaks are visited in ascending order and each takes the nearest
/// still-unmatched true break in range (the lower one on a distance tie).
pub fn score_indices(predicted: &[usize], truth: &[usize], tolerance: usize) -> Prf {
    let mut predicted = predicted.to_vec();
    predicted.sort_unstable();
    let mut used = vec![false; truth.len()];
    let mut matches = 0;
    for p in predicted.iter() {
        let best = truth
            .iter()
            .enumerate()
            .filter(|(j, t)| !used[*j] && t.abs_diff(*p) <= tolerance)
            .min_by_key(|(_, t)| (t.abs_diff(*p), **t));
        if let Some((j, _)) = best {
            used[j] = true;
            matches += 1;
        }
    }
    Prf::from_counts(matches, predicted.len(), truth.len())
}

pub fn score_changepoints(predicted: &ChangepointSet, truth: &[usize], tolerance: usize) -> Prf {
    score_indices(predicted.breaks(), truth, tolerance)
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub config_id: String,
    pub trend_rmse: f64,
    pub seasonal_rmse: f64,
    pub changepoint_precision: f64,
    pub changepoint_recall: f64,
    pub changepoint_f1: f64,
    pub anomaly_precision: f64,
    pub anomaly_recall: f64,
    pub runtime_ms: f64,
    /// Error message when the run failed; metrics are NaN in that case.
    pub error: Option<String>,
}

impl MethodScore {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rmse of unequal lengths");
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (ss / a.len() as f64).sqrt()
}

/// Runs every configuration on `data` and scores it against the ground truth.
///
/// Rows follow the input order. A failing configuration produces a row with
/// `error` set and does not affect the others.
pub fn compare_methods(
    data: &SyntheticSeries,
    configs: &[(String, PipelineConfig)],
    tolerance: usize,
) -> Vec<MethodScore> {
    configs
        .iter()
        .map(|(id, config)| {
            let clock = Instant::now();
            let outcome = decompose_structural(&data.series, config);
            let runtime_ms = clock.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok(result) => {
                    let cp = score_changepoints(
                        &result.changepoints,
                        data.true_breaks.breaks(),
                        tolerance,
                    );
                    let an = score_indices(
                        &result.anomalies.flagged_indices(),
                        &data.true_anomalies,
                        0,
                    );
                    MethodScore {
                        config_id: id.clone(),
                        trend_rmse: rmse(&result.trend, &data.trend),
                        seasonal_rmse: rmse(&result.seasonal, &data.seasonal),
                        changepoint_precision: cp.precision,
                        changepoint_recall: cp.recall,
                        changepoint_f1: cp.f1,
                        anomaly_precision: an.precision,
                        anomaly_recall: an.recall,
                        runtime_ms,
                        error: None,
                    }
                }
                Err(e) => MethodScore {
                    config_id: id.clone(),
                    trend_rmse: f64::NAN,
                    seasonal_rmse: f64::NAN,
                    changepoint_precision: f64::NAN,
                    changepoint_recall: f64::NAN,
                    changepoint_f1: f64::NAN,
                    anomaly_precision: f64::NAN,
                    anomaly_recall: f64::NAN,
                    runtime_ms,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
