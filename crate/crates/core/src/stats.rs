//! Streaming weighted moments and small statistical helpers.
//!
//! Metric samples carry frequency weights (a line item with quantity `q`
//! stands for `q` identical unit responses), so the accumulator here treats
//! a weight `w` as `w` repetitions of the value. The update is the weighted
//! form of Welford's recurrence, which stays accurate when currency values
//! are accumulated over millions of rows.

/// One-pass weighted mean/variance accumulator (frequency weights).
#[derive(Debug, Clone, Default)]
pub struct WeightedMoments {
    weight_sum: f64,
    mean: f64,
    m2: f64,
}

impl WeightedMoments {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `value` with frequency weight `weight` (> 0).
    pub fn add(&mut self, value: f64, weight: f64) {
        debug_assert!(weight > 0.0);
        self.weight_sum += weight;
        let delta = value - self.mean;
        self.mean += (weight / self.weight_sum) * delta;
        self.m2 += weight * delta * (value - self.mean);
    }

    /// Total weight seen so far (the effective sample size `n`).
    pub fn count(&self) -> f64 {
        self.weight_sum
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Weighted sample variance with the (n - 1) denominator.
    ///
    /// Weights are frequency counts, so this equals the plain sample
    /// variance of the expanded (materialized) response vector.
    pub fn sample_variance(&self) -> f64 {
        if self.weight_sum > 1.0 {
            self.m2 / (self.weight_sum - 1.0)
        } else {
            0.0
        }
    }
}

impl std::iter::FromIterator<(f64, f64)> for WeightedMoments {
    fn from_iter<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        let mut acc = Self::new();
        for (value, weight) in iter {
            acc.add(value, weight);
        }
        acc
    }
}

/// Unweighted sample mean.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unweighted sample standard deviation, (n - 1) denominator.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Pearson correlation over paired observations.
///
/// Returns NaN when either coordinate has zero variance.
pub fn pearson(pairs: &[(f64, f64)]) -> f64 {
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    sxy / (sxx * syy).sqrt()
}
