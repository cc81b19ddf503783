//! Seasonal extraction by cyclic-subseries means, and the final
//! trend/seasonal/residual split for additive and multiplicative models.

use crate::error::{Error, Result};
use crate::model::{check_period, Model};

/// Single-pass seasonal estimate.
///
/// Each phase `j` takes the mean of the detrended values at indices
/// `≡ j (mod period)`; the phase means are centered to sum to zero and tiled
/// over the series.
pub fn extract_seasonal(detrended: &[f64], period: Option<usize>) -> Result<Vec<f64>> {
    let period = period.ok_or(Error::PeriodMissing)?;
    let n = detrended.len();
    check_period(period, n)?;
    let profile = phase_profile(detrended, period);
    Ok((0..n).map(|i| profile[i % period]).collect())
}

/// Centered phase means, one per phase.
pub fn phase_profile(detrended: &[f64], period: usize) -> Vec<f64> {
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for (i, v) in detrended.iter().enumerate() {
        sums[i % period] += v;
        counts[i % period] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let center = means.iter().sum::<f64>() / period as f64;
    means.iter().map(|m| m - center).collect()
}

/// Trend, seasonal and residual components of one decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Splits `cleaned` given its trend.
///
/// Additive: `S` from `y − T`, `R = y − T − S`. Multiplicative: the same in
/// log space with `log T`, then exponentiated, so `y = T·S·R`. Without a
/// period the seasonal component is the identity (0 or 1).
pub fn decompose_components(
    cleaned: &[f64],
    trend: &[f64],
    period: Option<usize>,
    model: Model,
) -> Result<Components> {
    let n = cleaned.len();
    if trend.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: trend.len(),
        });
    }
    match model {
        Model::Additive => {
            let detrended: Vec<f64> = cleaned.iter().zip(trend).map(|(y, t)| y - t).collect();
            let seasonal = match period {
                Some(_) => extract_seasonal(&detrended, period)?,
                None => vec![0.0; n],
            };
            let residual = detrended.iter().zip(&seasonal).map(|(d, s)| d - s).collect();
            Ok(Components {
                trend: trend.to_vec(),
                seasonal,
                residual,
            })
        }
        Model::Multiplicative => {
            if let Some(i) = cleaned.iter().position(|&y| y <= 0.0) {
                return Err(Error::NonPositiveValueForMultiplicative(i));
            }
            if let Some(i) = trend.iter().position(|&t| t <= 0.0) {
                return Err(Error::NonPositiveValueForMultiplicative(i));
            }
            let log_y: Vec<f64> = cleaned.iter().map(|y| y.ln()).collect();
            let log_t: Vec<f64> = trend.iter().map(|t| t.ln()).collect();
            let additive = decompose_components(&log_y, &log_t, period, Model::Additive)?;
            Ok(Components {
                trend: trend.to_vec(),
                seasonal: additive.seasonal.iter().map(|s| s.exp()).collect(),
                residual: additive.residual.iter().map(|r| r.exp()).collect(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn alternating_is_its_own_seasonal() {
        let s = extract_seasonal(&[1.0, -1.0, 1.0, -1.0], Some(2)).unwrap();
        assert_eq!(s, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(extract_seasonal(&[0.0; 12], Some(3)).unwrap(), vec![0.0; 12]);
    }

    #[test]
    fn period_errors() {
        assert_eq!(extract_seasonal(&[0.0; 10], None), Err(Error::PeriodMissing));
        assert!(matches!(
            extract_seasonal(&[0.0; 10], Some(6)),
            Err(Error::PeriodTooLarge { .. })
        ));
        assert!(matches!(
            extract_seasonal(&[0.0; 10], Some(1)),
            Err(Error::PeriodTooLarge { .. })
        ));
        assert!(extract_seasonal(&[0.0; 10], Some(5)).is_ok());
    }

    #[test]
    fn drifting_sine_phase_amplitude() {
        let y: Vec<f64> = (0..240)
            .map(|t| (2.0 * PI * t as f64 / 12.0).sin() + 0.001 * t as f64)
            .collect();
        let s = extract_seasonal(&y, Some(12)).unwrap();
        for j in 0..12 {
            let truth = (2.0 * PI * j as f64 / 12.0).sin();
            assert!((s[j] - truth).abs() <= 0.02, "phase {j}: {} vs {truth}", s[j]);
        }
    }

    #[test]
    fn flat_series_has_no_seasonal_or_residual() {
        let y = vec![3.0; 20];
        let c = decompose_components(&y, &y, None, Model::Additive).unwrap();
        assert_eq!(c.seasonal, vec![0.0; 20]);
        assert_eq!(c.residual, vec![0.0; 20]);
        let c = decompose_components(&y, &y, None, Model::Multiplicative).unwrap();
        assert_eq!(c.seasonal, vec![1.0; 20]);
        assert_eq!(c.residual, vec![1.0; 20]);
    }

    #[test]
    fn multiplicative_known_factors() {
        let y: Vec<f64> = (0..240)
            .map(|t| 10.0 * (1.0 + 0.5 * (2.0 * PI * t as f64 / 12.0).sin()))
            .collect();
        let trend = vec![10.0; 240];
        let c = decompose_components(&y, &trend, Some(12), Model::Multiplicative).unwrap();
        for cycle in c.seasonal.chunks(12) {
            let geo = cycle.iter().map(|s| s.ln()).sum::<f64>() / 12.0;
            assert!((geo.exp() - 1.0).abs() < 1e-6);
        }
        assert!(c.trend.iter().all(|t| (t - 10.0).abs() <= 0.2));
        for i in 0..240 {
            let back = c.trend[i] * c.seasonal[i] * c.residual[i];
            assert!((back - y[i]).abs() < 1e-9 * 15.0);
        }
    }

    #[test]
    fn multiplicative_rejects_non_positive() {
        let y = [1.0, 2.0, -1.0, 3.0];
        assert_eq!(
            decompose_components(&y, &[1.0; 4], None, Model::Multiplicative),
            Err(Error::NonPositiveValueForMultiplicative(2))
        );
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn seasonal_sums_to_zero_per_cycle(
                period in 2usize..15,
                cycles in 2usize..10,
                extra in 0usize..14,
                seed in proptest::collection::vec(-50.0f64..50.0, 300),
            ) {
                let n = period * cycles + extra % period;
                let s = extract_seasonal(&seed[..n], Some(period)).unwrap();
                for cycle in s.chunks_exact(period) {
                    prop_assert!(cycle.iter().sum::<f64>().abs() < 1e-9);
                }
            }

            #[test]
            fn rotation_rotates_the_seasonal(
                period in 2usize..10,
                cycles in 2usize..8,
                k in 0usize..50,
                seed in proptest::collection::vec(-50.0f64..50.0, 80),
            ) {
                // Rotation preserves each phase's multiset only for whole cycles.
                let n = period * cycles;
                let y = &seed[..n];
                let k = k % n;
                let mut rotated = y.to_vec();
                rotated.rotate_right(k);
                let s = extract_seasonal(y, Some(period)).unwrap();
                let mut expected = s.clone();
                expected.rotate_right(k);
                let got = extract_seasonal(&rotated, Some(period)).unwrap();
                for (a, b) in got.iter().zip(&expected) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
