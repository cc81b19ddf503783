//! Per-stage method selection and parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AnomalyMethod, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangepointMethod {
    #[default]
    Pelt,
    Binseg,
    Cusum,
    None,
}

/// Per-changepoint penalty β.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    /// `2 σ̂² ln n` with a difference-based robust σ̂.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyPolicy {
    #[default]
    Replace,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    #[default]
    Lowess,
    MovingAverage,
    Penalized,
}

pub const DEFAULT_MIN_SEGMENT_LENGTH: usize = 10;
pub const DEFAULT_SPAN: f64 = 0.3;
pub const DEFAULT_ROBUSTNESS_ITERATIONS: usize = 2;
pub const DEFAULT_LAMBDA: f64 = 1600.0;
pub const DEFAULT_CUSUM_CRITICAL_VALUE: f64 = 1.358;
pub const DEFAULT_MAX_ANOMALY_FRACTION: f64 = 0.2;

/// Odd window derived from the period (`2·⌊p/2⌋+1`), or 11 without one.
pub fn default_window(period: Option<usize>) -> usize {
    match period {
        Some(p) => 2 * (p / 2) + 1,
        None => 11,
    }
}

/// Full pipeline configuration.
///
/// `anomaly_threshold` and `window` may be left as `None`; [`resolve`](Self::resolve)
/// materializes their defaults, and the resolved copy is what results echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub changepoint_method: ChangepointMethod,
    pub penalty: Penalty,
    pub min_segment_length: usize,
    pub cusum_critical_value: f64,
    /// Binary segmentation break budget; `None` means as many as fit.
    pub max_breaks: Option<usize>,
    pub anomaly_method: AnomalyMethod,
    pub anomaly_threshold: Option<f64>,
    pub anomaly_policy: AnomalyPolicy,
    pub max_anomaly_fraction: f64,
    pub smoother: SmootherKind,
    pub span: f64,
    pub robustness_iterations: usize,
    /// Moving-average smoother and rolling-median detector window.
    pub window: Option<usize>,
    pub lambda: f64,
    pub model: Model,
    pub period: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            changepoint_method: ChangepointMethod::Pelt,
            penalty: Penalty::Auto,
            min_segment_length: DEFAULT_MIN_SEGMENT_LENGTH,
            cusum_critical_value: DEFAULT_CUSUM_CRITICAL_VALUE,
            max_breaks: None,
            anomaly_method: AnomalyMethod::RollingMedian,
            anomaly_threshold: None,
            anomaly_policy: AnomalyPolicy::Replace,
            max_anomaly_fraction: DEFAULT_MAX_ANOMALY_FRACTION,
            smoother: SmootherKind::Lowess,
            span: DEFAULT_SPAN,
            robustness_iterations: DEFAULT_ROBUSTNESS_ITERATIONS,
            window: None,
            lambda: DEFAULT_LAMBDA,
            model: Model::Additive,
            period: None,
        }
    }
}

impl PipelineConfig {
    /// Checks every numeric parameter against its allowed range.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if let Penalty::Fixed(b) = self.penalty {
            if !(b.is_finite() && b > 0.0) {
                return bad(format!("penalty must be a positive real, got {b}"));
            }
        }
        if self.min_segment_length == 0 {
            return bad("min_segment_length must be positive".into());
        }
        if !(self.cusum_critical_value.is_finite() && self.cusum_critical_value > 0.0) {
            return bad(format!(
                "cusum critical value must be positive, got {}",
                self.cusum_critical_value
            ));
        }
        if self.max_breaks == Some(0) {
            return bad("max_breaks must be positive".into());
        }
        if let Some(t) = self.anomaly_threshold {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("anomaly threshold must be positive, got {t}"));
            }
        }
        if !(self.max_anomaly_fraction > 0.0 && self.max_anomaly_fraction <= 1.0) {
            return bad(format!(
                "max anomaly fraction must lie in (0, 1], got {}",
                self.max_anomaly_fraction
            ));
        }
        if !(self.span > 0.0 && self.span <= 1.0) {
            return bad(format!("span must lie in (0, 1], got {}", self.span));
        }
        if let Some(w) = self.window {
            if w < 3 || w % 2 == 0 {
                return bad(format!("window must be an odd integer >= 3, got {w}"));
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if let Some(p) = self.period {
            if p < 2 {
                return bad(format!("period must be at least 2, got {p}"));
            }
        }
        Ok(())
    }

    /// Copy with method-dependent defaults filled in.
    pub fn resolve(&self) -> PipelineConfig {
        let mut out = self.clone();
        out.anomaly_threshold = Some(
            self.anomaly_threshold
                .unwrap_or_else(|| self.anomaly_method.default_threshold()),
        );
        out.window = Some(self.window.unwrap_or_else(|| default_window(self.period)));
        out
    }

    pub fn resolved_window(&self) -> usize {
        self.window.unwrap_or_else(|| default_window(self.period))
    }

    pub fn resolved_threshold(&self) -> f64 {
        self.anomaly_threshold
            .unwrap_or_else(|| self.anomaly_method.default_threshold())
    }
}
