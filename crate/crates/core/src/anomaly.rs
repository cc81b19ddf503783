//! Point-anomaly detection and replacement.
//!
//! Detectors operate on one segment at a time and return a [`Detection`]
//! (flags + scores); [`apply_policy`] turns flags into a cleaned series.

use std::collections::BTreeMap;

use crate::config::AnomalyPolicy;
use crate::error::{Error, Result};
use crate::stats;

/// Flags and scores for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub flags: Vec<bool>,
    pub scores: Vec<f64>,
    pub threshold: f64,
}

impl Detection {
    fn quiet(n: usize, threshold: f64) -> Self {
        Self {
            flags: vec![false; n],
            scores: vec![0.0; n],
            threshold,
        }
    }

    fn from_scores(scores: Vec<f64>, threshold: f64) -> Self {
        let flags = scores.iter().map(|&s| s > threshold).collect();
        Self {
            flags,
            scores,
            threshold,
        }
    }
}

const MIN_SEGMENT: usize = 3;

fn check_len(len: usize, required: usize) -> Result<()> {
    if len < required {
        return Err(Error::SegmentTooShort { len, required });
    }
    Ok(())
}

/// Z-score detector: `|y − mean| / sd` with population sd.
pub fn detect_zscore(values: &[f64], threshold: f64) -> Result<Detection> {
    check_len(values.len(), MIN_SEGMENT)?;
    let mean = stats::mean(values);
    let sd = stats::population_sd(values);
    if sd == 0.0 {
        return Ok(Detection::quiet(values.len(), threshold));
    }
    let scores = values.iter().map(|v| (v - mean).abs() / sd).collect();
    Ok(Detection::from_scores(scores, threshold))
}

/// Scores `|x − median| / scale` using [`stats::robust_scale`]; all zeros
/// when the scale ladder bottoms out.
fn robust_scores(values: &[f64]) -> Option<Vec<f64>> {
    let (center, scale) = stats::robust_scale(values);
    if scale == 0.0 {
        return None;
    }
    Some(values.iter().map(|v| (v - center).abs() / scale).collect())
}

/// MAD detector: `|y − median| / (1.4826 · MAD)`.
///
/// When the MAD is zero the scale becomes `1.2533 · mean|y − median|`; when
/// that is also zero nothing is flagged.
pub fn detect_mad(values: &[f64], threshold: f64) -> Result<Detection> {
    check_len(values.len(), MIN_SEGMENT)?;
    Ok(match robust_scores(values) {
        Some(scores) => Detection::from_scores(scores, threshold),
        None => Detection::quiet(values.len(), threshold),
    })
}

/// Centered rolling median with windows shrunk symmetrically at the edges.
///
/// Point `i` uses radius `min(w/2, i, len−1−i)`, so the first and last points
/// are their own median.
pub fn rolling_median(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let r = half.min(i).min(n - 1 - i);
            stats::median(&values[i - r..=i + r]).expect("window is nonempty")
        })
        .collect()
}

/// Rolling-median detector: residuals from the centered rolling median are
/// scored like [`detect_mad`].
pub fn detect_rolling_median(values: &[f64], window: usize, threshold: f64) -> Result<Detection> {
    if window.is_multiple_of(2) {
        return Err(Error::EvenWindow(window));
    }
    check_len(window, MIN_SEGMENT)?;
    check_len(values.len(), window)?;
    let medians = rolling_median(values, window);
    let residuals: Vec<f64> = values.iter().zip(&medians).map(|(y, m)| y - m).collect();
    // Residual scores are measured from zero, not from the residual median.
    let (_, scale) = stats::robust_scale(&residuals);
    if scale == 0.0 {
        return Ok(Detection::quiet(values.len(), threshold));
    }
    let scores = residuals.iter().map(|r| r.abs() / scale).collect();
    Ok(Detection::from_scores(scores, threshold))
}

/// Applies the replacement policy.
///
/// `Replace` interpolates each flagged point linearly between the nearest
/// unflagged neighbours; flagged runs at either boundary copy the nearest
/// unflagged value. Unflagged points are never changed.
pub fn apply_policy(
    values: &[f64],
    flags: &[bool],
    policy: AnomalyPolicy,
) -> Result<(Vec<f64>, BTreeMap<usize, f64>)> {
    if flags.len() != values.len() {
        return Err(Error::FlagLengthMismatch {
            flags: flags.len(),
            n: values.len(),
        });
    }
    let mut cleaned = values.to_vec();
    let mut replacements = BTreeMap::new();
    if policy == AnomalyPolicy::Keep || !flags.iter().any(|&f| f) {
        return Ok((cleaned, replacements));
    }
    if flags.iter().all(|&f| f) {
        return Err(Error::AllPointsFlagged);
    }

    let n = values.len();
    let mut i = 0;
    while i < n {
        if !flags[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && flags[i] {
            i += 1;
        }
        let left = run_start.checked_sub(1);
        let right = (i < n).then_some(i);
        for j in run_start..i {
            let v = match (left, right) {
                (Some(l), Some(r)) => {
                    let frac = (j - l) as f64 / (r - l) as f64;
                    values[l] + frac * (values[r] - values[l])
                }
                (Some(l), None) => values[l],
                (None, Some(r)) => values[r],
                (None, None) => unreachable!("at least one unflagged point exists"),
            };
            cleaned[j] = v;
            replacements.insert(j, v);
        }
    }
    Ok((cleaned, replacements))
}
