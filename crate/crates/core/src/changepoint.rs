//! Mean-shift changepoint detection.
//!
//! Three detectors share the Gaussian change-in-mean cost:
//!
//! - [`detect_pelt`]: optimal penalized partition via dynamic programming
//!   with PELT candidate pruning.
//! - [`detect_binseg`]: greedy binary segmentation.
//! - [`detect_cusum`]: recursive CUSUM test against a Brownian-bridge critical value.
//!
//! [`exhaustive_optimal_partition`] solves the same objective as PELT with no
//! pruning and exists to check it.

use serde::{Deserialize, Serialize};

use crate::config::Penalty;
use crate::error::{Error, Result};
use crate::model::ChangepointSet;
use crate::stats;

/// Largest series the unpruned O(n²) partition accepts.
pub const ORACLE_MAX_LEN: usize = 2000;

/// Gaussian change-in-mean segment cost with O(1) evaluation.
///
/// For an inclusive segment `[a, b]` the cost is `Σy² − (Σy)²/(b−a+1)`, the
/// residual sum of squares around the segment mean.
#[derive(Debug, Clone)]
pub struct SegmentCost {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl SegmentCost {
    pub fn new(values: &[f64]) -> Self {
        // Centering first keeps the prefix sums small and the subtraction stable.
        let center = if values.is_empty() { 0.0 } else { stats::mean(values) };
        let mut sum = Vec::with_capacity(values.len() + 1);
        let mut sum_sq = Vec::with_capacity(values.len() + 1);
        sum.push(0.0);
        sum_sq.push(0.0);
        let (mut s, mut s2) = (0.0, 0.0);
        for v in values {
            let x = v - center;
            s += x;
            s2 += x * x;
            sum.push(s);
            sum_sq.push(s2);
        }
        Self { sum, sum_sq }
    }

    pub fn len(&self) -> usize {
        self.sum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cost of the inclusive segment `[a, b]`.
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.cost_span(a, b + 1)
    }

    /// Cost of the half-open span `[start, end)`.
    #[inline]
    fn cost_span(&self, start: usize, end: usize) -> f64 {
        let m = (end - start) as f64;
        let s = self.sum[end] - self.sum[start];
        let s2 = self.sum_sq[end] - self.sum_sq[start];
        (s2 - s * s / m).max(0.0)
    }
}

/// How the per-break penalty β is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum PenaltyPolicy {
    #[default]
    Auto,
    Fixed(f64),
}

impl From<Penalty> for PenaltyPolicy {
    fn from(p: Penalty) -> Self {
        match p {
            Penalty::Auto => PenaltyPolicy::Auto,
            Penalty::Fixed(b) => PenaltyPolicy::Fixed(b),
        }
    }
}

impl PenaltyPolicy {
    /// Resolves β for `values`.
    ///
    /// `Auto` gives `2 σ̂² ln n` with σ̂ = MAD(Δy)/(√2·0.6745); when σ̂ is zero
    /// it falls back to `ln n`.
    pub fn resolve(&self, values: &[f64]) -> f64 {
        match *self {
            PenaltyPolicy::Fixed(b) => b,
            PenaltyPolicy::Auto => {
                let ln_n = (values.len() as f64).ln();
                let sigma = stats::difference_sigma(values);
                if sigma > 0.0 {
                    2.0 * sigma * sigma * ln_n
                } else {
                    ln_n
                }
            }
        }
    }
}

/// A penalized partition and its objective value `Σ cost + β·k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub changepoints: ChangepointSet,
    pub objective: f64,
    pub penalty: f64,
}

fn check_length(n: usize, min_segment_length: usize) -> Result<()> {
    if min_segment_length == 0 {
        return Err(Error::InvalidConfig("min_segment_length must be positive".into()));
    }
    let required = 2 * min_segment_length;
    if n < required {
        return Err(Error::SeriesTooShort { n, required });
    }
    Ok(())
}

/// `F[t]` is the optimal cost of `y[0..t)`; `F[0] = −β` so the first segment is free.
fn backtrack(last: &[usize], n: usize) -> Vec<usize> {
    let mut breaks = Vec::new();
    let mut t = n;
    while t > 0 {
        let s = last[t];
        if s > 0 {
            breaks.push(s - 1);
        }
        t = s;
    }
    breaks.reverse();
    breaks
}

/// Whether a segmentation may end a segment at prefix length `s`.
#[inline]
fn admissible_end(s: usize, min_segment_length: usize) -> bool {
    s == 0 || s >= min_segment_length
}

/// Optimal penalized partition using PELT pruning.
///
/// A candidate `s` with `F(s) + C(s, t) > F(t)` can never again be optimal
/// once `t` itself is admissible as a predecessor, i.e. from `t + min_len`
/// on. Candidates are therefore retired `min_len` steps after the prune
/// condition first holds, which keeps the result identical to the unpruned
/// program under the minimum-length constraint.
pub fn detect_pelt(
    values: &[f64],
    penalty: PenaltyPolicy,
    min_segment_length: usize,
) -> Result<Segmentation> {
    let n = values.len();
    check_length(n, min_segment_length)?;
    let beta = penalty.resolve(values);
    let cost = SegmentCost::new(values);
    let m = min_segment_length;

    let mut f = vec![f64::INFINITY; n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = -beta;
    // (candidate prefix length, step at which it was first found dominated)
    let mut candidates: Vec<(usize, Option<usize>)> = Vec::new();

    for t in m..=n {
        let entering = t - m;
        if admissible_end(entering, m) && f[entering].is_finite() {
            candidates.push((entering, None));
        }
        candidates.retain(|&(_, pruned)| pruned.is_none_or(|p| p + m > t));

        let mut best = f64::INFINITY;
        let mut best_s = 0;
        for &(s, _) in &candidates {
            let v = f[s] + cost.cost_span(s, t) + beta;
            if v < best {
                best = v;
                best_s = s;
            }
        }
        f[t] = best;
        last[t] = best_s;

        if best.is_finite() {
            for (s, pruned) in candidates.iter_mut() {
                if pruned.is_none() && f[*s] + cost.cost_span(*s, t) > best {
                    *pruned = Some(t);
                }
            }
        }
    }

    Ok(Segmentation {
        changepoints: ChangepointSet::new(backtrack(&last, n), n)?,
        objective: f[n],
        penalty: beta,
    })
}

/// Unpruned O(n²) dynamic program over every admissible segmentation.
///
/// Same objective and tie-breaking as [`detect_pelt`]; limited to
/// `n <= ORACLE_MAX_LEN`.
pub fn exhaustive_optimal_partition(
    values: &[f64],
    penalty: PenaltyPolicy,
    min_segment_length: usize,
) -> Result<Segmentation> {
    let n = values.len();
    if n > ORACLE_MAX_LEN {
        return Err(Error::OracleSizeExceeded {
            n,
            limit: ORACLE_MAX_LEN,
        });
    }
    check_length(n, min_segment_length)?;
    let beta = penalty.resolve(values);
    let cost = SegmentCost::new(values);
    let m = min_segment_length;

    let mut f = vec![f64::INFINITY; n + 1];
    let mut last = vec![0usize; n + 1];
    f[0] = -beta;
    for t in m..=n {
        for s in 0..=t - m {
            if !admissible_end(s, m) || !f[s].is_finite() {
                continue;
            }
            let v = f[s] + cost.cost_span(s, t) + beta;
            if v < f[t] {
                f[t] = v;
                last[t] = s;
            }
        }
    }

    Ok(Segmentation {
        changepoints: ChangepointSet::new(backtrack(&last, n), n)?,
        objective: f[n],
        penalty: beta,
    })
}

/// Best admissible split of `[start, end)`: `(k, gain)` with the left child `[start, k)`.
fn best_split(cost: &SegmentCost, start: usize, end: usize, m: usize) -> Option<(usize, f64)> {
    if end - start < 2 * m {
        return None;
    }
    let whole = cost.cost_span(start, end);
    let mut best: Option<(usize, f64)> = None;
    for k in start + m..=end - m {
        let gain = whole - cost.cost_span(start, k) - cost.cost_span(k, end);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((k, gain));
        }
    }
    best
}

/// Greedy binary segmentation.
///
/// At each round the split with the largest cost reduction over all current
/// segments is accepted if it exceeds β; splitting stops when nothing
/// qualifies or `max_breaks` is reached.
pub fn detect_binseg(
    values: &[f64],
    penalty: PenaltyPolicy,
    min_segment_length: usize,
    max_breaks: usize,
) -> Result<Segmentation> {
    let n = values.len();
    check_length(n, min_segment_length)?;
    let beta = penalty.resolve(values);
    let cost = SegmentCost::new(values);
    let m = min_segment_length;

    // (start, end, best split)
    let mut open = vec![(0, n, best_split(&cost, 0, n, m))];
    let mut breaks = Vec::new();
    while breaks.len() < max_breaks {
        let mut pick: Option<(usize, usize, f64)> = None;
        for (i, (start, _, split)) in open.iter().enumerate() {
            if let Some((_, gain)) = split {
                let better = match pick {
                    None => true,
                    Some((_, best_start, best_gain)) => {
                        *gain > best_gain || (*gain == best_gain && *start < best_start)
                    }
                };
                if better {
                    pick = Some((i, *start, *gain));
                }
            }
        }
        let Some((i, _, gain)) = pick else { break };
        if gain <= beta {
            break;
        }
        let (start, end, split) = open.swap_remove(i);
        let (k, _) = split.expect("picked segment has a split");
        breaks.push(k - 1);
        open.push((start, k, best_split(&cost, start, k, m)));
        open.push((k, end, best_split(&cost, k, end, m)));
    }
    breaks.sort_unstable();

    let objective = segmentation_objective(&cost, &breaks, beta);
    Ok(Segmentation {
        changepoints: ChangepointSet::new(breaks, n)?,
        objective,
        penalty: beta,
    })
}

/// `Σ cost(segment) + β · #breaks` for an arbitrary break set.
pub fn segmentation_objective(cost: &SegmentCost, breaks: &[usize], beta: f64) -> f64 {
    let mut total = beta * breaks.len() as f64;
    let mut start = 0;
    for &b in breaks {
        total += cost.cost_span(start, b + 1);
        start = b + 1;
    }
    total + cost.cost_span(start, cost.len())
}

/// CUSUM statistic of one segment: `(Q, k)` where `k` is the admissible
/// left length attaining the maximum.
fn cusum_statistic(segment: &[f64], m: usize) -> Option<(f64, usize)> {
    let len = segment.len();
    if len < 2 * m {
        return None;
    }
    let mut sigma = stats::difference_sigma(segment);
    if sigma == 0.0 {
        // Noise-free steps have zero difference spread; use the plain sd.
        sigma = stats::population_sd(segment);
    }
    if sigma == 0.0 {
        return Some((0.0, m));
    }
    let mean = stats::mean(segment);
    let norm = sigma * (len as f64).sqrt();
    let mut partial = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in segment[..len - m].iter().enumerate() {
        partial += v - mean;
        let k = i + 1;
        if k < m {
            continue;
        }
        let q = partial.abs() / norm;
        if best.is_none_or(|(bq, _)| q > bq) {
            best = Some((q, k));
        }
    }
    best
}

/// Recursive CUSUM segmentation.
///
/// A segment is split at the argmax of its standardized cumulative-sum path
/// when the maximum exceeds `critical_value`; both halves are then tested in
/// turn.
pub fn detect_cusum(
    values: &[f64],
    critical_value: f64,
    min_segment_length: usize,
) -> Result<ChangepointSet> {
    let n = values.len();
    check_length(n, min_segment_length)?;
    let m = min_segment_length;

    let mut breaks = Vec::new();
    let mut stack = vec![(0, n)];
    while let Some((start, end)) = stack.pop() {
        if let Some((q, k)) = cusum_statistic(&values[start..end], m) {
            if q > critical_value {
                let split = start + k;
                breaks.push(split - 1);
                stack.push((split, end));
                stack.push((start, split));
            }
        }
    }
    breaks.sort_unstable();
    ChangepointSet::new(breaks, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(levels: &[(f64, usize)]) -> Vec<f64> {
        levels
            .iter()
            .flat_map(|&(v, k)| std::iter::repeat_n(v, k))
            .collect()
    }

    #[test]
    fn cost_is_rss_around_mean() {
        let c = SegmentCost::new(&[1.0, 2.0, 3.0, 10.0]);
        assert!((c.cost(0, 2) - 2.0).abs() < 1e-12);
        assert_eq!(c.cost(3, 3), 0.0);
    }

    #[test]
    fn auto_penalty_falls_back_without_spread() {
        let y = step(&[(0.0, 50), (10.0, 50)]);
        assert!((PenaltyPolicy::Auto.resolve(&y) - 100f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pelt_constant_has_no_breaks() {
        let seg = detect_pelt(&[5.0; 100], PenaltyPolicy::Auto, 10).unwrap();
        assert!(seg.changepoints.is_empty());
    }

    #[test]
    fn pelt_single_and_double_step() {
        let y = step(&[(0.0, 50), (10.0, 50)]);
        let seg = detect_pelt(&y, PenaltyPolicy::Auto, 10).unwrap();
        assert_eq!(seg.changepoints.breaks(), &[49]);

        let y = step(&[(0.0, 30), (5.0, 30), (0.0, 30)]);
        let seg = detect_pelt(&y, PenaltyPolicy::Auto, 10).unwrap();
        assert_eq!(seg.changepoints.breaks(), &[29, 59]);
    }

    #[test]
    fn pelt_rejects_short_series() {
        assert_eq!(
            detect_pelt(&[1.0; 15], PenaltyPolicy::Auto, 10),
            Err(Error::SeriesTooShort { n: 15, required: 20 })
        );
    }

    #[test]
    fn oracle_size_guard() {
        let y = vec![0.0; ORACLE_MAX_LEN + 1];
        assert!(matches!(
            exhaustive_optimal_partition(&y, PenaltyPolicy::Auto, 10),
            Err(Error::OracleSizeExceeded { .. })
        ));
        let seg = exhaustive_optimal_partition(&[5.0; 100], PenaltyPolicy::Auto, 10).unwrap();
        assert!(seg.changepoints.is_empty());
    }

    #[test]
    fn binseg_examples() {
        let seg = detect_binseg(&[3.0; 80], PenaltyPolicy::Auto, 10, 10).unwrap();
        assert!(seg.changepoints.is_empty());
        let y = step(&[(0.0, 40), (8.0, 40)]);
        let seg = detect_binseg(&y, PenaltyPolicy::Auto, 10, 10).unwrap();
        assert_eq!(seg.changepoints.breaks(), &[39]);
        let y = step(&[(0.0, 30), (5.0, 30), (0.0, 30)]);
        let seg = detect_binseg(&y, PenaltyPolicy::Auto, 10, 10).unwrap();
        assert_eq!(seg.changepoints.breaks(), &[29, 59]);
    }

    #[test]
    fn binseg_respects_break_budget() {
        let y = step(&[(0.0, 30), (5.0, 30), (0.0, 30)]);
        let seg = detect_binseg(&y, PenaltyPolicy::Auto, 10, 1).unwrap();
        assert_eq!(seg.changepoints.len(), 1);
    }

    #[test]
    fn cusum_noise_free() {
        assert!(detect_cusum(&[2.0; 60], 1.358, 10).unwrap().is_empty());
        let y = step(&[(0.0, 50), (10.0, 50)]);
        assert_eq!(detect_cusum(&y, 1.358, 10).unwrap().breaks(), &[49]);
    }

    #[test]
    fn tie_breaks_pick_smallest_index() {
        // A symmetric bump: two equally good single splits; the DP must pick
        // the same one as the oracle regardless of pruning.
        let y = step(&[(0.0, 10), (1.0, 10), (0.0, 10)]);
        let a = detect_pelt(&y, PenaltyPolicy::Fixed(1e3), 10).unwrap();
        let b = exhaustive_optimal_partition(&y, PenaltyPolicy::Fixed(1e3), 10).unwrap();
        assert_eq!(a, b);
    }
}
