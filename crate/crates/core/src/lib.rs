//! Modular structural decomposition of univariate time series.
//!
//! A series passes through four independent, user-selectable stages:
//!
//! 1. [`changepoint`] detection on the raw values (PELT, binary segmentation, CUSUM),
//! 2. per-segment [`anomaly`] detection and replacement,
//! 3. per-segment trend [`smoothing`] (LOESS, moving average, Whittaker),
//! 4. [`seasonal`] extraction and residuals (additive or multiplicative).
//!
//! [`decompose_structural`] runs them in order; [`bench::compare_methods`]
//! scores configurations against [`synthetic`] ground truth.

pub mod anomaly;
pub mod bench;
pub mod changepoint;
pub mod config;
mod error;
pub mod model;
pub mod pipeline;
pub mod seasonal;
pub mod smoothing;
pub mod stats;
pub mod synthetic;

pub use config::{
    AnomalyPolicy, ChangepointMethod, Penalty, PipelineConfig, SmootherKind,
};
pub use error::{Error, Result, Stage};
pub use model::{
    segments_from, validate_series, AnomalyMethod, AnomalyReport, ChangepointSet,
    DecompositionResult, Model, Segment, Summary, TimeSeries,
};
pub use pipeline::{decompose_structural, decompose_structural_observed, StageObserver};
pub use synthetic::{generate_synthetic, SyntheticSeries, SyntheticSpec, TrendBreak};
