//! Seeded synthetic series with known components.
//!
//! The generated series is
//!
//! ```text
//! y_t = T_t + A·sin(2πt/p) + ε_t + spikes_t
//! ```
//!
//! where `T` is piecewise linear with optional level jumps and `ε ~ N(0, σ²)`.
//!
//! Randomness is fully determined by the seed: uniforms come from ChaCha8
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`) converted to `[0, 1)` by
//! `rand`'s standard 53-bit float sampling, and Gaussian draws use the
//! Box–Muller transform on pairs `(u₁, u₂)`:
//! `z₀ = √(−2 ln(1−u₁)) cos(2πu₂)`, `z₁ = √(−2 ln(1−u₁)) sin(2πu₂)`,
//! consumed in that order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChangepointSet, TimeSeries};

/// A regime change in the synthetic trend, starting at sample `index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendBreak {
    /// First sample of the new regime.
    pub index: usize,
    pub new_slope: f64,
    pub level_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n: usize,
    pub base_level: f64,
    pub base_slope: f64,
    pub trend_breaks: Vec<TrendBreak>,
    pub seasonal_amplitude: f64,
    /// Seasonal period; also attached to the generated series when valid for `n`.
    pub period: Option<usize>,
    pub noise_sd: f64,
    pub spike_indices: Vec<usize>,
    pub spike_magnitude: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 200,
            base_level: 0.0,
            base_slope: 0.0,
            trend_breaks: Vec::new(),
            seasonal_amplitude: 0.0,
            period: None,
            noise_sd: 0.0,
            spike_indices: Vec::new(),
            spike_magnitude: 0.0,
            seed: 0,
        }
    }
}

/// A generated series together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSeries {
    pub series: TimeSeries,
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub noise: Vec<f64>,
    /// Breaks in [`ChangepointSet`] convention (last sample before each regime change).
    pub true_breaks: ChangepointSet,
    pub true_anomalies: Vec<usize>,
}

/// Seeded standard-normal stream (Box–Muller over ChaCha8 uniforms).
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = self.rng.random();
        let u2: f64 = self.rng.random();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return bad(format!("noise_sd must be non-negative, got {}", self.noise_sd));
        }
        if let Some(p) = self.period {
            if p == 0 {
                return bad("period must be positive".into());
            }
        } else if self.seasonal_amplitude != 0.0 {
            return bad("a seasonal amplitude needs a period".into());
        }
        for w in self.trend_breaks.windows(2) {
            if w[0].index >= w[1].index {
                return bad("trend breaks must be strictly increasing".into());
            }
        }
        if let Some(b) = self
            .trend_breaks
            .iter()
            .find(|b| b.index == 0 || b.index >= self.n)
        {
            return bad(format!("trend break at {} outside 1..{}", b.index, self.n));
        }
        if let Some(i) = self.spike_indices.iter().find(|&&i| i >= self.n) {
            return bad(format!("spike index {i} outside series of length {}", self.n));
        }
        let finite = [
            self.base_level,
            self.base_slope,
            self.seasonal_amplitude,
            self.spike_magnitude,
        ];
        if finite.iter().any(|v| !v.is_finite())
            || self
                .trend_breaks
                .iter()
                .any(|b| !(b.new_slope.is_finite() && b.level_jump.is_finite()))
        {
            return bad("all numeric parameters must be finite".into());
        }
        Ok(())
    }

    /// Piecewise-linear ground-truth trend.
    pub fn trend(&self) -> Vec<f64> {
        let mut trend = Vec::with_capacity(self.n);
        let (mut anchor_t, mut anchor_level, mut slope) = (0usize, self.base_level, self.base_slope);
        let mut breaks = self.trend_breaks.iter().peekable();
        for t in 0..self.n {
            if let Some(b) = breaks.next_if(|b| b.index == t) {
                let prev = anchor_level + slope * (t - 1 - anchor_t) as f64;
                anchor_t = t - 1;
                anchor_level = prev + b.level_jump;
                slope = b.new_slope;
            }
            trend.push(anchor_level + slope * (t - anchor_t) as f64);
        }
        trend
    }
}

/// Generates the series described by `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticSeries> {
    spec.validate()?;
    let n = spec.n;
    let trend = spec.trend();
    let seasonal: Vec<f64> = match spec.period {
        Some(p) if spec.seasonal_amplitude != 0.0 => (0..n)
            .map(|t| {
                spec.seasonal_amplitude
                    * (2.0 * std::f64::consts::PI * t as f64 / p as f64).sin()
            })
            .collect(),
        _ => vec![0.0; n],
    };
    let mut stream = GaussianStream::new(spec.seed);
    let noise: Vec<f64> = if spec.noise_sd > 0.0 {
        (0..n).map(|_| spec.noise_sd * stream.next_gaussian()).collect()
    } else {
        vec![0.0; n]
    };
    let mut values: Vec<f64> = (0..n).map(|t| trend[t] + seasonal[t] + noise[t]).collect();
    let mut true_anomalies = spec.spike_indices.clone();
    true_anomalies.sort_unstable();
    true_anomalies.dedup();
    for &i in &true_anomalies {
        values[i] += spec.spike_magnitude;
    }

    let period = spec.period.filter(|&p| p >= 2 && p <= n / 2);
    let series = TimeSeries::new(values)?.with_period(period)?;
    let true_breaks = ChangepointSet::new(
        spec.trend_breaks.iter().map(|b| b.index - 1).collect(),
        n,
    )?;
    Ok(SyntheticSeries {
        series,
        trend,
        seasonal,
        noise,
        true_breaks,
        true_anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_series_is_the_base_line() {
        let spec = SyntheticSpec {
            n: 50,
            base_level: 3.0,
            base_slope: 0.25,
            ..Default::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        for (t, v) in s.series.values().iter().enumerate() {
            assert_eq!(*v, 3.0 + 0.25 * t as f64);
        }
    }

    #[test]
    fn same_seed_same_series() {
        let spec = SyntheticSpec {
            n: 100,
            noise_sd: 1.0,
            seed: 42,
            ..Default::default()
        };
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
        let other = SyntheticSpec { seed: 43, ..spec.clone() };
        assert_ne!(
            generate_synthetic(&spec).unwrap().series,
            generate_synthetic(&other).unwrap().series
        );
    }

    #[test]
    fn seasonal_pattern_is_exact_without_noise() {
        let spec = SyntheticSpec {
            n: 48,
            base_level: 1.0,
            seasonal_amplitude: 2.0,
            period: Some(12),
            ..Default::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        for (t, v) in s.series.values().iter().enumerate() {
            let phase = (2.0 * std::f64::consts::PI * (t % 12) as f64 / 12.0).sin();
            assert!((v - 1.0 - 2.0 * phase).abs() < 1e-12);
        }
        assert_eq!(s.series.period(), Some(12));
    }

    #[test]
    fn breaks_jump_and_bend() {
        let spec = SyntheticSpec {
            n: 10,
            trend_breaks: vec![TrendBreak {
                index: 5,
                new_slope: 1.0,
                level_jump: 10.0,
            }],
            ..Default::default()
        };
        let s = generate_synthetic(&spec).unwrap();
        assert_eq!(s.trend, vec![0.0, 0.0, 0.0, 0.0, 0.0, 11.0, 12.0, 13.0, 14.0, 15.0]);
        assert_eq!(s.true_breaks.breaks(), &[4]);
    }

    #[test]
    fn gaussian_stream_moments() {
        let mut g = GaussianStream::new(7);
        let draws: Vec<f64> = (0..20_000).map(|_| g.next_gaussian()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn invalid_specs() {
        let base = SyntheticSpec::default();
        for spec in [
            SyntheticSpec { n: 0, ..base.clone() },
            SyntheticSpec { noise_sd: -1.0, ..base.clone() },
            SyntheticSpec { spike_indices: vec![500], ..base.clone() },
            SyntheticSpec { seasonal_amplitude: 1.0, ..base.clone() },
            SyntheticSpec {
                trend_breaks: vec![TrendBreak { index: 0, new_slope: 0.0, level_jump: 1.0 }],
                ..base.clone()
            },
        ] {
            assert!(matches!(generate_synthetic(&spec), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
    }
}
