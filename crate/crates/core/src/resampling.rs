//! Poisson bootstrap standard errors with cluster-aware weighting.
//!
//! A resample does not draw rows: it draws one Poisson(1) weight per
//! cluster and reweights every response by its cluster's weight, keeping
//! whole users (and, in multi-way mode, whole products) together. The SE
//! is the standard deviation of the B reweighted means. Each resample
//! derives its own random stream from (seed, resample index), so results
//! are bit-identical no matter how many threads evaluate them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{SeEstimate, SeMethod};
use crate::model::{responses_for_metric, Dataset, MetricKind, ResponseSample};
use crate::stats::{mean, sample_sd};

/// Which cluster structure the bootstrap respects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BootstrapMode {
    /// One Poisson weight per user cluster.
    #[serde(rename = "one-way")]
    OneWay,
    /// Independent Poisson weights per user and per product; a response's
    /// weight is the product of its two cluster weights.
    #[serde(rename = "multi-way")]
    MultiWay,
}

impl BootstrapMode {
    pub fn method(self) -> SeMethod {
        match self {
            BootstrapMode::OneWay => SeMethod::BootstrapOneWay,
            BootstrapMode::MultiWay => SeMethod::BootstrapMultiWay,
        }
    }
}

/// Bootstrap tuning: resample count, seed, mode, and CV batching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub b: usize,
    pub seed: u64,
    pub mode: BootstrapMode,
    /// Number of batches the B means are split into for the CV estimate.
    pub cv_batches: usize,
}

/// Default resample count. 500 to 1000 keeps the SE's own coefficient of
/// variation under a few percent.
pub const DEFAULT_B: usize = 500;
/// Default batch count for the CV estimate.
pub const DEFAULT_CV_BATCHES: usize = 10;

impl BootstrapConfig {
    pub fn new(b: usize, seed: u64, mode: BootstrapMode, cv_batches: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidConfig(format!(
                "bootstrap needs at least 2 resamples, got {b}"
            )));
        }
        if cv_batches < 2 {
            return Err(Error::InvalidConfig(format!(
                "CV batching needs at least 2 batches, got {cv_batches}"
            )));
        }
        if b % cv_batches != 0 {
            return Err(Error::InvalidConfig(format!(
                "batch count {cv_batches} must divide resample count {b}"
            )));
        }
        Ok(Self {
            b,
            seed,
            mode,
            cv_batches,
        })
    }

    pub fn one_way(b: usize, seed: u64) -> Result<Self> {
        Self::new(b, seed, BootstrapMode::OneWay, DEFAULT_CV_BATCHES)
    }

    pub fn multi_way(b: usize, seed: u64) -> Result<Self> {
        Self::new(b, seed, BootstrapMode::MultiWay, DEFAULT_CV_BATCHES)
    }
}

/// One draw from Poisson(1) by inversion (sequential search).
///
/// Hand-rolled so the draw depends only on the stream's next uniform,
/// which keeps resamples identical across platforms and library versions.
pub fn poisson_weight<R: Rng>(rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-1.0f64).exp();
    let mut cdf = p;
    while u > cdf && k < 200 {
        k += 1;
        p /= f64::from(k);
        cdf += p;
    }
    k
}

/// The stream for attempt `attempt` of resample `r` under `b` resamples.
///
/// Attempt 0 is the normal draw; higher attempts are redraws after a
/// degenerate (total-weight-zero) resample.
fn resample_rng(seed: u64, b: usize, r: usize, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64 * b as u64 + r as u64);
    rng
}

/// Weighted mean of `sample` under per-cluster Poisson weights.
///
/// `user_weights` must have one entry per user cluster; `product_weights`,
/// when given, one per product cluster, and each response's weight is then
/// the product of its two cluster weights. Returns `None` when the total
/// weight is zero: the degenerate resample carries no information and the
/// caller redraws it.
pub fn bootstrap_mean(
    sample: &ResponseSample,
    user_weights: &[u32],
    product_weights: Option<&[u32]>,
) -> Option<f64> {
    assert_eq!(
        user_weights.len(),
        sample.user_cluster_count(),
        "one weight per user cluster"
    );
    if let Some(pw) = product_weights {
        assert_eq!(
            pw.len(),
            sample.product_cluster_count(),
            "one weight per product cluster"
        );
    }

    let values = sample.values();
    let unit_weights = sample.weights();
    let users = sample.user_clusters();
    let mut sum_w = 0.0f64;
    let mut sum_wx = 0.0f64;
    match product_weights {
        None => {
            for i in 0..values.len() {
                let w = f64::from(user_weights[users[i] as usize]) * unit_weights[i];
                sum_w += w;
                sum_wx += w * values[i];
            }
        }
        Some(pw) => {
            let products = sample.product_clusters();
            for i in 0..values.len() {
                let cluster_w =
                    u64::from(user_weights[users[i] as usize]) * u64::from(pw[products[i] as usize]);
                let w = cluster_w as f64 * unit_weights[i];
                sum_w += w;
                sum_wx += w * values[i];
            }
        }
    }
    if sum_w == 0.0 {
        None
    } else {
        Some(sum_wx / sum_w)
    }
}

fn draw_mean(sample: &ResponseSample, config: &BootstrapConfig, r: usize) -> f64 {
    for attempt in 0.. {
        let mut rng = resample_rng(config.seed, config.b, r, attempt);
        let user_weights: Vec<u32> = (0..sample.user_cluster_count())
            .map(|_| poisson_weight(&mut rng))
            .collect();
        let product_weights: Option<Vec<u32>> = match config.mode {
            BootstrapMode::OneWay => None,
            BootstrapMode::MultiWay => Some(
                (0..sample.product_cluster_count())
                    .map(|_| poisson_weight(&mut rng))
                    .collect(),
            ),
        };
        if let Some(m) = bootstrap_mean(sample, &user_weights, product_weights.as_deref()) {
            return m;
        }
    }
    unreachable!("redraw loop yields a non-degenerate resample")
}

/// The B bootstrap means of `sample`, in resample-index order.
pub fn bootstrap_means(sample: &ResponseSample, config: &BootstrapConfig) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::InsufficientSample {
            n: 0.0,
            needed: 1.0,
        });
    }
    if config.mode == BootstrapMode::MultiWay && sample.product_cluster_count() == 0 {
        return Err(Error::UnsupportedMetric {
            metric: sample.metric().to_string(),
            method: "multi-way bootstrap".to_owned(),
            reason: "responses carry no product cluster labels".to_owned(),
        });
    }
    Ok((0..config.b)
        .into_par_iter()
        .map(|r| draw_mean(sample, config, r))
        .collect())
}

/// CV of the SE estimate by the batch method: the B means are split into
/// `batches` consecutive batches, an SE is computed per batch, and
/// `cv = sd(batch SEs) / (mean(batch SEs) * sqrt(batches))`.
fn batch_cv(means: &[f64], batches: usize) -> f64 {
    let size = means.len() / batches;
    let batch_ses: Vec<f64> = means.chunks_exact(size).map(sample_sd).collect();
    let center = mean(&batch_ses);
    if center == 0.0 {
        return 0.0;
    }
    sample_sd(&batch_ses) / (center * (batches as f64).sqrt())
}

/// Bootstrap SE of the sample mean: the standard deviation of B
/// cluster-reweighted means.
pub fn bootstrap_se(sample: &ResponseSample, config: &BootstrapConfig) -> Result<SeEstimate> {
    let means = bootstrap_means(sample, config)?;
    let se = sample_sd(&means);
    let cv = batch_cv(&means, config.cv_batches);
    Ok(SeEstimate::new(se, config.mode.method())
        .with_b(config.b)
        .with_cv(cv)
        .with_seed(config.seed))
}

/// One expanding-window point of an SE-ratio trajectory.
///
/// Estimate fields are `None` when the window held fewer than two
/// responses; the point is kept as a marker so the series stays aligned
/// with its window grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub fraction: f64,
    pub vanilla_se: Option<f64>,
    pub boot_se: Option<f64>,
    pub ratio: Option<f64>,
    pub ratio_lo: Option<f64>,
    pub ratio_hi: Option<f64>,
    pub method: SeMethod,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
}

/// Bootstrap-to-vanilla SE ratios over K expanding windows.
///
/// Window i covers the first i/K of the dataset's time span, so the series
/// reads as "what the ratio would have looked like had the experiment
/// stopped here". The ratio's 95% CI comes from the bootstrap SE's batch
/// CV under a normal approximation, with the vanilla SE treated as fixed.
pub fn trajectory(
    dataset: &Dataset,
    metric: MetricKind,
    windows: usize,
    config: &BootstrapConfig,
) -> Result<Vec<TrajectoryPoint>> {
    if windows < 2 {
        return Err(Error::InvalidConfig(format!(
            "a trajectory needs at least 2 windows, got {windows}"
        )));
    }
    let mut points = Vec::with_capacity(windows);
    for i in 1..=windows {
        let fraction = i as f64 / windows as f64;
        let window = dataset.window_fraction(fraction)?;
        let mut point = TrajectoryPoint {
            fraction,
            vanilla_se: None,
            boot_se: None,
            ratio: None,
            ratio_lo: None,
            ratio_hi: None,
            method: config.mode.method(),
            b: config.b,
            seed: config.seed,
        };
        let sample = match responses_for_metric(dataset, metric, window) {
            Ok(s) if s.n() >= 2.0 => s,
            Ok(_) | Err(Error::EmptySample { .. }) => {
                points.push(point);
                continue;
            }
            Err(e) => return Err(e),
        };
        let vanilla = crate::model::vanilla_se(&sample)?;
        let boot = bootstrap_se(&sample, config)?;
        point.vanilla_se = Some(vanilla.se);
        point.boot_se = Some(boot.se);
        if vanilla.se > 0.0 {
            let ratio = boot.se / vanilla.se;
            let cv = boot.cv.unwrap_or(0.0);
            let half = 1.959963984540054 * cv * ratio;
            point.ratio = Some(ratio);
            point.ratio_lo = Some(ratio - half);
            point.ratio_hi = Some(ratio + half);
        }
        points.push(point);
    }
    Ok(points)
}
