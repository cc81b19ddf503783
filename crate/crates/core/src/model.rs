//! Shared data types: the observed series, changepoint sets and segments,
//! anomaly reports and decomposition results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};

/// An observed signal with optional axis labels and seasonal period.
///
/// Values are guaranteed finite and nonempty. Labels are carried through to
/// outputs untouched; nothing in the toolkit parses them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    time_labels: Option<Vec<String>>,
    period: Option<usize>,
}

impl TimeSeries {
    /// Builds a series from already-complete values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            values,
            time_labels: None,
            period: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::LabelLengthMismatch {
                labels: labels.len(),
                values: self.values.len(),
            });
        }
        self.time_labels = Some(labels);
        Ok(self)
    }

    /// Attaches a seasonal period; `None` clears it.
    pub fn with_period(mut self, period: Option<usize>) -> Result<Self> {
        if let Some(p) = period {
            check_period(p, self.values.len())?;
        }
        self.period = period;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time_labels(&self) -> Option<&[String]> {
        self.time_labels.as_deref()
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn check_period(period: usize, n: usize) -> Result<()> {
    if period < 2 || period > n / 2 {
        return Err(Error::PeriodTooLarge { period, n });
    }
    Ok(())
}

/// Validates raw input into a [`TimeSeries`].
///
/// `None` marks a missing observation. Without `impute`, any missing value is
/// rejected. With `impute`, interior gaps are filled by linear interpolation
/// between the nearest finite neighbours; gaps touching either end are still
/// rejected. Non-finite values (NaN, ±∞) are always rejected.
pub fn validate_series(
    raw_values: &[Option<f64>],
    time_labels: Option<Vec<String>>,
    impute: bool,
) -> Result<TimeSeries> {
    if raw_values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(labels) = &time_labels {
        if labels.len() != raw_values.len() {
            return Err(Error::LabelLengthMismatch {
                labels: labels.len(),
                values: raw_values.len(),
            });
        }
    }
    for (i, v) in raw_values.iter().enumerate() {
        match v {
            Some(x) if !x.is_finite() => return Err(Error::NonFiniteValue(i)),
            None if !impute => return Err(Error::MissingValue(i)),
            _ => {}
        }
    }

    let n = raw_values.len();
    if raw_values[0].is_none() {
        return Err(Error::LeadingOrTrailingMissing(0));
    }
    if raw_values[n - 1].is_none() {
        let first_trailing = raw_values
            .iter()
            .rposition(Option::is_some)
            .map_or(0, |i| i + 1);
        return Err(Error::LeadingOrTrailingMissing(first_trailing));
    }

    let mut values = Vec::with_capacity(n);
    let mut last_known = 0usize;
    for (i, v) in raw_values.iter().enumerate() {
        if let Some(x) = v {
            // Fill the gap (last_known, i) now that both ends are known.
            let left = raw_values[last_known].unwrap_or_default();
            let gap = i - last_known;
            for k in 1..gap {
                let frac = k as f64 / gap as f64;
                values.push(left + frac * (x - left));
            }
            values.push(*x);
            last_known = i;
        }
    }

    let series = TimeSeries::new(values)?;
    match time_labels {
        Some(labels) => series.with_labels(labels),
        None => Ok(series),
    }
}

/// A contiguous run of samples, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub id: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end + 1
    }
}

/// Ordered break indices over a series of length `n`.
///
/// A break `b` is the last sample of the segment to its left, so breaks
/// `[b₁, …, b_k]` induce segments `[0, b₁], [b₁+1, b₂], …, [b_k+1, n−1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangepointSet {
    breaks: Vec<usize>,
    n: usize,
}

impl ChangepointSet {
    pub fn new(breaks: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        if let Some(&b) = breaks.iter().find(|&&b| b + 1 >= n) {
            return Err(Error::InvalidChangepoints(format!(
                "break {b} out of range for length {n}"
            )));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidChangepoints(
                "breaks must be strictly increasing".into(),
            ));
        }
        Ok(Self { breaks, n })
    }

    /// No breaks: one segment covering the whole series.
    pub fn empty(n: usize) -> Self {
        Self {
            breaks: Vec::new(),
            n,
        }
    }

    pub fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.breaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty()
    }

    pub fn segments(&self) -> Vec<Segment> {
        segments_from(self)
    }

    /// Segment id for every sample index.
    pub fn segment_ids(&self) -> Vec<usize> {
        let mut ids = Vec::with_capacity(self.n);
        for seg in self.segments() {
            ids.extend(std::iter::repeat_n(seg.id, seg.len()));
        }
        ids
    }
}

/// Materializes the segments induced by a changepoint set.
pub fn segments_from(changepoints: &ChangepointSet) -> Vec<Segment> {
    let mut segments = Vec::with_capacity(changepoints.breaks.len() + 1);
    let mut start = 0;
    for (id, &b) in changepoints.breaks.iter().enumerate() {
        segments.push(Segment { start, end: b, id });
        start = b + 1;
    }
    segments.push(Segment {
        start,
        end: changepoints.n - 1,
        id: changepoints.breaks.len(),
    });
    segments
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyMethod {
    Zscore,
    Mad,
    RollingMedian,
    None,
}

impl AnomalyMethod {
    /// Threshold used when the caller does not pick one.
    pub fn default_threshold(self) -> f64 {
        match self {
            AnomalyMethod::Mad => 3.5,
            AnomalyMethod::Zscore | AnomalyMethod::RollingMedian | AnomalyMethod::None => 3.0,
        }
    }
}

/// Flags, scores and replacements for one detection pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub flags: Vec<bool>,
    pub scores: Vec<f64>,
    pub method: AnomalyMethod,
    /// Index → value substituted by the replacement policy.
    pub replacements: BTreeMap<usize, f64>,
    pub threshold_used: f64,
}

impl AnomalyReport {
    /// A report with nothing flagged.
    pub fn none(n: usize) -> Self {
        Self {
            flags: vec![false; n],
            scores: vec![0.0; n],
            method: AnomalyMethod::None,
            replacements: BTreeMap::new(),
            threshold_used: 0.0,
        }
    }

    pub fn flagged_indices(&self) -> Vec<usize> {
        self.flags
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    #[default]
    Additive,
    Multiplicative,
}

/// Descriptive figures attached to a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub segment_count: usize,
    pub changepoint_count: usize,
    pub anomaly_count: usize,
    /// Variance of each component as a share of the cleaned series variance.
    pub variance_share: VarianceShare,
    /// Resolved penalty β, when a penalized detector ran.
    pub penalty_used: Option<f64>,
    /// Wall-clock milliseconds per stage. Not serialized, so serialized
    /// results stay deterministic.
    #[serde(skip)]
    pub stage_timings_ms: Vec<(crate::error::Stage, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceShare {
    pub trend: f64,
    pub seasonal: f64,
    pub residual: f64,
}

/// Aligned components plus everything needed to audit how they were made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    /// Raw observed values.
    pub observed: Vec<f64>,
    /// Observed values after the anomaly policy.
    pub cleaned: Vec<f64>,
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<f64>,
    pub model: Model,
    pub changepoints: ChangepointSet,
    pub anomalies: AnomalyReport,
    pub config_echo: PipelineConfig,
    pub summary: Summary,
}

impl DecompositionResult {
    pub fn len(&self) -> usize {
        self.cleaned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cleaned.is_empty()
    }

    /// Largest deviation between the cleaned series and its recombined
    /// components (`T+S+R` or `T·S·R`).
    pub fn reconstruction_error(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let recombined = match self.model {
                    Model::Additive => self.trend[i] + self.seasonal[i] + self.residual[i],
                    Model::Multiplicative => self.trend[i] * self.seasonal[i] * self.residual[i],
                };
                (self.cleaned[i] - recombined).abs()
            })
            .fold(0.0, f64::max)
    }
}
