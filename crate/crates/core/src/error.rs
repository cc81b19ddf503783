use std::fmt;

use serde::{Deserialize, Serialize};

/// Pipeline stage, used to tag errors and instrumentation events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validation,
    Changepoint,
    Anomaly,
    Smoothing,
    Seasonal,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Validation => "validation",
            Stage::Changepoint => "changepoint",
            Stage::Anomaly => "anomaly",
            Stage::Smoothing => "smoothing",
            Stage::Seasonal => "seasonal",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("missing value at index {0} (enable imputation to interpolate interior gaps)")]
    MissingValue(usize),
    #[error("missing value at series boundary, index {0}; cannot interpolate")]
    LeadingOrTrailingMissing(usize),
    #[error("time labels have length {labels}, values have length {values}")]
    LabelLengthMismatch { labels: usize, values: usize },
    #[error("period {period} invalid for series of length {n} (need 2 <= period <= n/2)")]
    PeriodTooLarge { period: usize, n: usize },
    #[error("a seasonal period is required")]
    PeriodMissing,
    #[error("invalid changepoint set: {0}")]
    InvalidChangepoints(String),
    #[error("series of length {n} is too short; need at least {required}")]
    SeriesTooShort { n: usize, required: usize },
    #[error("exhaustive partition limited to n <= {limit}, got {n}")]
    OracleSizeExceeded { n: usize, limit: usize },
    #[error("segment of length {len} is too short; need at least {required}")]
    SegmentTooShort { len: usize, required: usize },
    #[error("window must be odd, got {0}")]
    EvenWindow(usize),
    #[error("window {window} exceeds segment length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("every point is flagged as anomalous; nothing to interpolate from")]
    AllPointsFlagged,
    #[error("flags have length {flags}, series has length {n}")]
    FlagLengthMismatch { flags: usize, n: usize },
    #[error("{count} anomalies flagged, exceeding the cap of {cap} ({fraction} of {n} points)")]
    TooManyAnomalies {
        count: usize,
        cap: usize,
        fraction: f64,
        n: usize,
    },
    #[error("multiplicative model requires positive values; value at index {0} is not positive")]
    NonPositiveValueForMultiplicative(usize),
    #[error("component length {got} does not match series length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("{stage} stage{}: {source}", segment.map(|s| format!(" (segment {s})")).unwrap_or_default())]
    Stage {
        stage: Stage,
        segment: Option<usize>,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage, segment: Option<usize>) -> Self {
        Error::Stage {
            stage,
            segment,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
