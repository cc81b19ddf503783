//! Trend smoothers: LOESS, centered moving average and the Whittaker
//! second-difference smoother, applied per segment.

use crate::config::SmootherKind;
use crate::error::{Error, Result, Stage};
use crate::model::ChangepointSet;
use crate::stats;

/// Smoother choice with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoother {
    Lowess {
        span: f64,
        robustness_iterations: usize,
    },
    MovingAverage {
        window: usize,
    },
    Penalized {
        lambda: f64,
    },
}

impl Smoother {
    pub fn from_kind(
        kind: SmootherKind,
        span: f64,
        robustness_iterations: usize,
        window: usize,
        lambda: f64,
    ) -> Self {
        match kind {
            SmootherKind::Lowess => Smoother::Lowess {
                span,
                robustness_iterations,
            },
            SmootherKind::MovingAverage => Smoother::MovingAverage { window },
            SmootherKind::Penalized => Smoother::Penalized { lambda },
        }
    }

    /// Shortest segment the smoother accepts.
    pub fn min_len(&self) -> usize {
        match *self {
            Smoother::Lowess { .. } | Smoother::Penalized { .. } => 4,
            Smoother::MovingAverage { window } => window.max(3),
        }
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Smoother::Lowess {
                span,
                robustness_iterations,
            } => smooth_lowess(values, span, robustness_iterations),
            Smoother::MovingAverage { window } => smooth_moving_average(values, window),
            Smoother::Penalized { lambda } => smooth_penalized(values, lambda),
        }
    }
}

fn check_len(len: usize, required: usize) -> Result<()> {
    if len < required {
        return Err(Error::SegmentTooShort { len, required });
    }
    Ok(())
}

/// Start of the `q`-point neighbourhood of `i` in `0..n`.
///
/// Nearest points by `|j − i|`, ties going to the lower index.
fn neighbourhood_start(i: usize, q: usize, n: usize) -> usize {
    i.saturating_sub(q / 2).min(n - q)
}

/// Weighted degree-1 fit evaluated at `x0`. Falls back to the weighted mean
/// when fewer than two distinct abscissae carry weight, and to `None` when no
/// weight remains.
fn local_linear(xs: std::ops::Range<usize>, ys: &[f64], weights: &[f64], x0: f64) -> Option<f64> {
    let mut sw = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for ((x, &y), &w) in xs.clone().zip(ys).zip(weights) {
        sw += w;
        sx += w * x as f64;
        sy += w * y;
    }
    if sw <= 0.0 {
        return None;
    }
    let xbar = sx / sw;
    let ybar = sy / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((x, &y), &w) in xs.zip(ys).zip(weights) {
        let dx = x as f64 - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * (y - ybar);
    }
    // Relative guard: a single weighted point leaves sxx at rounding level.
    if sxx <= 1e-12 * sw {
        return Some(ybar);
    }
    Some(ybar + sxy / sxx * (x0 - xbar))
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

fn bisquare(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        t * t
    }
}

fn lowess_pass(values: &[f64], q: usize, robustness: Option<&[f64]>) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    let mut weights = vec![0.0; q];
    for i in 0..n {
        let lo = neighbourhood_start(i, q, n);
        let d_max = (i - lo).max(lo + q - 1 - i) as f64;
        for (k, w) in weights.iter_mut().enumerate() {
            let d = (lo + k).abs_diff(i) as f64;
            *w = if d_max == 0.0 { 1.0 } else { tricube(d / d_max) };
        }
        let ys = &values[lo..lo + q];
        let fit = match robustness {
            Some(delta) => {
                let robust: Vec<f64> = weights
                    .iter()
                    .zip(&delta[lo..lo + q])
                    .map(|(w, d)| w * d)
                    .collect();
                local_linear(lo..lo + q, ys, &robust, i as f64)
                    .or_else(|| local_linear(lo..lo + q, ys, &weights, i as f64))
            }
            None => local_linear(lo..lo + q, ys, &weights, i as f64),
        };
        out.push(fit.unwrap_or(values[i]));
    }
    out
}

/// LOESS with degree-1 local fits and tricube weights.
///
/// Each point uses its `q = max(⌈span·m⌉, 3)` nearest neighbours. Robustness
/// iterations reweight by the bisquare of `e / (6·median|e|)` and refit,
/// stopping early when the residuals vanish (to rounding precision).
pub fn smooth_lowess(values: &[f64], span: f64, robustness_iterations: usize) -> Result<Vec<f64>> {
    let m = values.len();
    check_len(m, 4)?;
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::InvalidConfig(format!("span must lie in (0, 1], got {span}")));
    }
    let q = ((span * m as f64).ceil() as usize).clamp(3, m);
    let mut fit = lowess_pass(values, q, None);
    // Residuals at rounding level carry no outlier information.
    let negligible = 1e-10 * values.iter().map(|v| v.abs()).sum::<f64>() / m as f64;
    for _ in 0..robustness_iterations {
        let residuals: Vec<f64> = values.iter().zip(&fit).map(|(y, f)| y - f).collect();
        let abs: Vec<f64> = residuals.iter().map(|e| e.abs()).collect();
        let scale = stats::median(&abs).unwrap_or(0.0);
        if scale <= negligible {
            break;
        }
        let delta: Vec<f64> = residuals.iter().map(|e| bisquare(e / (6.0 * scale))).collect();
        fit = lowess_pass(values, q, Some(&delta));
    }
    Ok(fit)
}

/// Centered moving average; edge windows shrink symmetrically down to a
/// single point at each end.
pub fn smooth_moving_average(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window.is_multiple_of(2) {
        return Err(Error::EvenWindow(window));
    }
    if window < 3 {
        return Err(Error::InvalidConfig(format!("window must be at least 3, got {window}")));
    }
    let n = values.len();
    if window > n {
        return Err(Error::WindowTooLarge { window, len: n });
    }
    let half = window / 2;
    Ok((0..n)
        .map(|i| {
            let r = half.min(i).min(n - 1 - i);
            stats::mean(&values[i - r..=i + r])
        })
        .collect())
}

/// Whittaker smoother: minimizes `Σ(y − z)² + λ Σ(Δ²z)²` by solving the
/// pentadiagonal system `(I + λ D₂ᵀD₂) z = y` with a banded LDLᵀ factorization.
pub fn smooth_penalized(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = values.len();
    check_len(n, 4)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!("lambda must be non-negative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(values.to_vec());
    }

    // Bands of D₂ᵀD₂: main diagonal, first and second super-diagonals.
    let mut d0 = vec![6.0; n];
    d0[0] = 1.0;
    d0[n - 1] = 1.0;
    d0[1] = 5.0;
    d0[n - 2] = 5.0;
    let mut d1 = vec![-4.0; n - 1];
    d1[0] = -2.0;
    d1[n - 2] = -2.0;
    let d2 = vec![1.0; n - 2];

    let a0: Vec<f64> = d0.iter().map(|v| 1.0 + lambda * v).collect();
    let a1: Vec<f64> = d1.iter().map(|v| lambda * v).collect();
    let a2: Vec<f64> = d2.iter().map(|v| lambda * v).collect();

    // LDLᵀ with unit lower factor L: l1[i] = L[i][i−1], l2[i] = L[i][i−2].
    let mut d = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    for i in 0..n {
        if i >= 2 {
            l2[i] = a2[i - 2] / d[i - 2];
        }
        if i >= 1 {
            let mut v = a1[i - 1];
            if i >= 2 {
                v -= l2[i] * d[i - 2] * l1[i - 1];
            }
            l1[i] = v / d[i - 1];
        }
        let mut di = a0[i];
        if i >= 1 {
            di -= l1[i] * l1[i] * d[i - 1];
        }
        if i >= 2 {
            di -= l2[i] * l2[i] * d[i - 2];
        }
        d[i] = di;
    }

    // Solve for the correction δ = z − y, i.e. (I + λD₂ᵀD₂) δ = −λ D₂ᵀD₂ y.
    // The right side is built from second differences, so affine inputs give
    // a right side of pure rounding noise and come back unchanged.
    let second: Vec<f64> = values.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let at = |k: usize| second.get(k).copied().unwrap_or(0.0);
            let mut v = at(i);
            if i >= 1 {
                v -= 2.0 * at(i - 1);
            }
            if i >= 2 {
                v += at(i - 2);
            }
            -lambda * v
        })
        .collect();

    // Forward solve L w' = w, then back solve D Lᵀ δ = w'.
    for i in 1..n {
        w[i] -= l1[i] * w[i - 1];
        if i >= 2 {
            w[i] -= l2[i] * w[i - 2];
        }
    }
    let mut delta: Vec<f64> = w.iter().zip(&d).map(|(wi, di)| wi / di).collect();
    for i in (0..n).rev() {
        if i + 1 < n {
            delta[i] -= l1[i + 1] * delta[i + 1];
        }
        if i + 2 < n {
            delta[i] -= l2[i + 2] * delta[i + 2];
        }
    }
    Ok(values.iter().zip(&delta).map(|(y, e)| y + e).collect())
}

/// Applies `smoother` independently to each segment and concatenates.
///
/// Segments shorter than the smoother's minimum take their own mean, so no
/// smoothing window ever reaches across a changepoint.
pub fn smooth_segmented(
    values: &[f64],
    changepoints: &ChangepointSet,
    smoother: Smoother,
) -> Result<Vec<f64>> {
    if changepoints.n() != values.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            got: changepoints.n(),
        });
    }
    let mut trend = Vec::with_capacity(values.len());
    for seg in changepoints.segments() {
        let part = &values[seg.range()];
        if part.len() < smoother.min_len() {
            let mean = stats::mean(part);
            trend.extend(std::iter::repeat_n(mean, part.len()));
        } else {
            let smoothed = smoother
                .apply(part)
                .map_err(|e| e.at(Stage::Smoothing, Some(seg.id)))?;
            trend.extend(smoothed);
        }
    }
    Ok(trend)
}
