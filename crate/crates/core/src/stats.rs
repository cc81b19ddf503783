//! Small robust-statistics helpers shared across stages.

/// Gaussian consistency constant for the MAD (1 / Φ⁻¹(3/4)).
pub const MAD_SCALE: f64 = 1.4826;

/// Gaussian consistency constant for the mean absolute deviation (√(π/2)).
pub const MEAN_ABS_DEV_SCALE: f64 = 1.2533;

/// Median of a slice; `None` when empty. Even lengths average the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        Some(sorted[mid])
    } else {
        Some(0.5 * (sorted[mid - 1] + sorted[mid]))
    }
}

/// Unscaled median absolute deviation about the median.
pub fn mad(values: &[f64]) -> Option<f64> {
    let center = median(values)?;
    let deviations: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    median(&deviations)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn population_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Robust noise scale from first differences: MAD(Δy) / (√2 · 0.6745).
///
/// Differencing removes level shifts, so the estimate is insensitive to the
/// breaks it is later used to detect. Returns 0 for fewer than two values.
pub fn difference_sigma(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    mad(&diffs).unwrap_or(0.0) / (std::f64::consts::SQRT_2 * 0.6745)
}

/// Robust residual scale with the degeneracy ladder used by the anomaly detectors.
///
/// Returns `(center, scale)` where scale is `1.4826 · MAD`, falling back to
/// `1.2533 · mean|x − median|` when the MAD is zero. A zero scale means the
/// values carry no spread at all.
pub fn robust_scale(values: &[f64]) -> (f64, f64) {
    let center = median(values).unwrap_or(0.0);
    let deviations: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    let mad = median(&deviations).unwrap_or(0.0);
    if mad > 0.0 {
        return (center, MAD_SCALE * mad);
    }
    let mean_abs = mean(&deviations);
    (center, MEAN_ABS_DEV_SCALE * mean_abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn mad_of_alternating() {
        let v = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 10.0];
        assert_eq!(median(&v), Some(1.5));
        assert_eq!(mad(&v), Some(0.5));
    }

    #[test]
    fn robust_scale_falls_back_to_mean_abs_dev() {
        let v = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0];
        let (center, scale) = robust_scale(&v);
        assert_eq!(center, 1.0);
        assert!((scale - 1.2533 * 0.9).abs() < 1e-12);
        assert_eq!(robust_scale(&[2.0; 5]).1, 0.0);
    }

    #[test]
    fn difference_sigma_ignores_a_single_step() {
        let mut v = vec![0.0; 50];
        v.extend(vec![10.0; 50]);
        assert_eq!(difference_sigma(&v), 0.0);
    }
}
