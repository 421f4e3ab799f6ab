//! Synthetic clustered-transaction generator and A/A / A/B harnesses.
//!
//! The generator produces datasets whose within-user dependence is known
//! by construction, which is exactly what the real datasets cannot offer:
//! basket values are lognormal with an additive user effect on the log
//! scale, and the user effect's share of the log-variance is the
//! intraclass correlation `rho`. The harnesses then run many simulated
//! experiments over such data and measure what each SE method actually
//! delivers: CI coverage in A/A runs, rejection rate in A/B runs.

use chrono::NaiveDateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delta::delta_se_for_metric;
use crate::error::{Error, Result};
use crate::estimate::SeMethod;
use crate::inference::two_sample_test;
use crate::model::{responses_for_metric, vanilla_se, Dataset, MetricKind};
use crate::resampling::{bootstrap_se, BootstrapConfig, BootstrapMode, DEFAULT_CV_BATCHES};

/// Generative parameters for a synthetic transaction dataset.
///
/// Laws: basket counts per user are zero-truncated Poisson with mean
/// `basket_mean`; basket values are lognormal, `log v = value_log_mean +
/// a_u + e` with `a_u ~ N(0, rho * value_log_sd^2)` and
/// `e ~ N(0, (1-rho) * value_log_sd^2)`; basket sizes are zero-truncated
/// Poisson with mean `size_mean` scaled by a per-user lognormal rate
/// multiplier with log-sd `size_user_sd`; every unit of a basket is the
/// user's home product with probability `concentration`, otherwise a
/// uniform catalog draw. Unit price is basket value over basket size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub users: usize,
    /// Mean baskets per user; 1 means exactly one basket for everyone.
    pub basket_mean: f64,
    /// User share of the log-scale value variance (intraclass correlation).
    pub rho: f64,
    pub value_log_mean: f64,
    pub value_log_sd: f64,
    /// Mean units per basket before the user multiplier.
    pub size_mean: f64,
    /// Log-sd of the per-user size rate multiplier (0 = no size clustering).
    pub size_user_sd: f64,
    /// Product catalog size.
    pub products: usize,
    /// Probability a unit is the user's home product.
    pub concentration: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            users: 2000,
            basket_mean: 3.0,
            rho: 0.5,
            value_log_mean: 3.0,
            value_log_sd: 0.8,
            size_mean: 3.0,
            size_user_sd: 0.3,
            products: 100,
            concentration: 0.5,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn new(users: usize, rho: f64, basket_mean: f64, seed: u64) -> Result<Self> {
        let config = Self {
            users,
            rho,
            basket_mean,
            seed,
            ..Self::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users < 1 {
            return Err(Error::InvalidConfig("user count must be at least 1".into()));
        }
        if self.products < 1 {
            return Err(Error::InvalidConfig("catalog needs at least 1 product".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidProbability {
                name: "rho",
                value: self.rho,
            });
        }
        if !(0.0..=1.0).contains(&self.concentration) {
            return Err(Error::InvalidProbability {
                name: "concentration",
                value: self.concentration,
            });
        }
        for (name, v, min) in [
            ("basket_mean", self.basket_mean, 1.0),
            ("size_mean", self.size_mean, 1.0),
        ] {
            if !v.is_finite() || v < min {
                return Err(Error::InvalidConfig(format!(
                    "{name} is the mean of a zero-truncated count and must be at least {min}, \
                     got {v}"
                )));
            }
        }
        for (name, v) in [
            ("value_log_sd", self.value_log_sd),
            ("size_user_sd", self.size_user_sd),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a non-negative standard deviation, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Rate of a zero-truncated Poisson with the given mean (>= 1).
///
/// Solves `r / (1 - exp(-r)) = mean` by bisection; mean 1 maps to the
/// degenerate rate 0 (the count is then always 1).
fn ztp_rate(mean: f64) -> f64 {
    if mean <= 1.0 + 1e-12 {
        return 0.0;
    }
    // The mean lies between r and r + 1, so r is bracketed by (mean-1, mean).
    let (mut lo, mut hi) = (mean - 1.0, mean);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let m = mid / (1.0 - (-mid).exp());
        if m < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One zero-truncated Poisson draw by inversion over the truncated CDF.
fn ztp_draw<R: Rng>(rate: f64, rng: &mut R) -> u32 {
    if rate <= 0.0 {
        return 1;
    }
    let norm = 1.0 - (-rate).exp();
    let target = rng.random::<f64>() * norm;
    let mut k = 1u32;
    let mut p = rate * (-rate).exp();
    let mut cdf = p;
    while target > cdf && k < 100_000 {
        k += 1;
        p *= rate / f64::from(k);
        cdf += p;
    }
    k
}

fn normal_draw<R: Rng>(sd: f64, rng: &mut R) -> f64 {
    if sd == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sd).expect("validated sd").sample(rng)
}

const SPAN_SECONDS: u64 = 360 * 86_400;

fn base_instant() -> NaiveDateTime {
    chrono::NaiveDate::from_ymd_opt(2023, 1, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
}

fn generate_with<R: Rng>(config: &SynthConfig, rng: &mut R) -> Result<Dataset> {
    let basket_rate = ztp_rate(config.basket_mean);
    let size_rate = ztp_rate(config.size_mean);
    let user_sd = (config.rho.sqrt()) * config.value_log_sd;
    let noise_sd = ((1.0 - config.rho).sqrt()) * config.value_log_sd;
    let base = base_instant();

    let mut builder = Dataset::builder();
    let mut product_counts = vec![0u32; config.products];
    for u in 0..config.users {
        let user_id = format!("u{u}");
        let user_effect = normal_draw(user_sd, rng);
        let size_multiplier = (normal_draw(config.size_user_sd, rng)
            - 0.5 * config.size_user_sd * config.size_user_sd)
            .exp();
        let home = rng.random_range(0..config.products);
        let baskets = ztp_draw(basket_rate, rng);
        for t in 0..baskets {
            let txn_id = format!("t{u}-{t}");
            let offset = rng.random_range(0..SPAN_SECONDS);
            let timestamp = base + chrono::Duration::seconds(offset as i64);
            let value =
                (config.value_log_mean + user_effect + normal_draw(noise_sd, rng)).exp();
            let size = ztp_draw(size_rate * size_multiplier, rng);
            let unit_price = value / f64::from(size);
            product_counts.iter_mut().for_each(|c| *c = 0);
            for _ in 0..size {
                let p = if rng.random::<f64>() < config.concentration {
                    home
                } else {
                    rng.random_range(0..config.products)
                };
                product_counts[p] += 1;
            }
            for (p, &count) in product_counts.iter().enumerate() {
                if count > 0 {
                    builder.push(&user_id, &txn_id, &format!("p{p}"), unit_price, count, timestamp)?;
                }
            }
        }
    }
    builder.finish()
}

/// Generate the dataset described by `config`, deterministically.
pub fn generate(config: &SynthConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    generate_with(config, &mut rng)
}

/// A/A or A/B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HarnessKind {
    /// No treatment difference; `rate` is empirical CI coverage of 0.
    #[serde(rename = "aa")]
    Aa,
    /// Multiplicative lift on treatment basket values; `rate` is the
    /// empirical rejection rate (power).
    #[serde(rename = "ab")]
    Ab,
}

/// Per-method harness outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub method: SeMethod,
    /// Coverage (A/A) or rejection rate (A/B).
    pub rate: f64,
    /// Binomial SE of `rate`: sqrt(rate * (1 - rate) / R).
    pub rate_se: f64,
    /// Mean SE of the group difference across replications.
    pub mean_se: f64,
}

/// Aggregated result of R simulated experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessResult {
    pub kind: HarnessKind,
    pub metric: MetricKind,
    pub replications: usize,
    pub alpha: f64,
    /// Multiplicative lift applied to treatment basket values (0 for A/A).
    pub effect: f64,
    pub b: usize,
    pub seed: u64,
    pub outcomes: Vec<MethodOutcome>,
}

const MIN_REPLICATIONS: usize = 100;

struct RepOutcome {
    covered: bool,
    se_diff: f64,
}

/// One simulated experiment: generate, split, estimate, test.
///
/// All random draws (dataset, split, bootstrap seeds) come from the
/// replication's own stream in a fixed order, so results do not depend on
/// which methods are requested or on execution order across threads.
fn replicate(
    config: &SynthConfig,
    metric: MetricKind,
    effect: f64,
    methods: &[SeMethod],
    b: usize,
    alpha: f64,
    rep: usize,
) -> Result<Vec<RepOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // Stream 0 belongs to `generate`; replications use streams 1..=R.
    rng.set_stream(rep as u64 + 1);
    let dataset = generate_with(config, &mut rng)?;

    let assignment: Vec<bool> = loop {
        let draw: Vec<bool> = (0..dataset.user_count()).map(|_| rng.random::<bool>()).collect();
        let treated = draw.iter().filter(|&&t| t).count();
        if treated >= 2 && dataset.user_count() - treated >= 2 {
            break draw;
        }
    };
    let seed_a: u64 = rng.random();
    let seed_b: u64 = rng.random();

    let mut arm_a = Dataset::builder();
    let mut arm_b = Dataset::builder();
    for item in dataset.items() {
        let user = dataset.users().name(item.user.0);
        let txn = dataset.txn_ids().name(item.transaction.0);
        let product = dataset.products().name(item.product.0);
        if assignment[item.user.0 as usize] {
            let lifted = item.unit_price * (1.0 + effect);
            arm_b.push(user, txn, product, lifted, item.quantity, item.timestamp)?;
        } else {
            arm_a.push(user, txn, product, item.unit_price, item.quantity, item.timestamp)?;
        }
    }
    let arm_a = arm_a.finish()?;
    let arm_b = arm_b.finish()?;
    let window_a = arm_a.full_window()?;
    let window_b = arm_b.full_window()?;
    let sample_a = responses_for_metric(&arm_a, metric, window_a)?;
    let sample_b = responses_for_metric(&arm_b, metric, window_b)?;

    let mut outcomes = Vec::with_capacity(methods.len());
    for &method in methods {
        let se_pair = |seed: u64, sample: &crate::model::ResponseSample, arm: &Dataset, window| {
            match method {
                SeMethod::Vanilla => vanilla_se(sample),
                SeMethod::BootstrapOneWay => bootstrap_se(
                    sample,
                    &BootstrapConfig::new(b, seed, BootstrapMode::OneWay, DEFAULT_CV_BATCHES)?,
                ),
                SeMethod::BootstrapMultiWay => bootstrap_se(
                    sample,
                    &BootstrapConfig::new(b, seed, BootstrapMode::MultiWay, DEFAULT_CV_BATCHES)?,
                ),
                SeMethod::Delta => delta_se_for_metric(arm, metric, window),
            }
        };
        let se_a = se_pair(seed_a, &sample_a, &arm_a, window_a)?;
        let se_b = se_pair(seed_b, &sample_b, &arm_b, window_b)?;
        let test = two_sample_test(sample_a.mean(), se_a.se, sample_b.mean(), se_b.se, alpha)?;
        outcomes.push(RepOutcome {
            covered: test.ci_lo <= 0.0 && 0.0 <= test.ci_hi,
            se_diff: test.se,
        });
    }
    Ok(outcomes)
}

fn run_harness(
    config: &SynthConfig,
    kind: HarnessKind,
    metric: MetricKind,
    effect: f64,
    reps: usize,
    methods: &[SeMethod],
    b: usize,
    alpha: f64,
) -> Result<HarnessResult> {
    config.validate()?;
    if reps < MIN_REPLICATIONS {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_REPLICATIONS} replications are needed for a meaningful rate, got {reps}"
        )));
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no SE methods requested".into()));
    }
    if !(effect >= 0.0) || !effect.is_finite() {
        return Err(Error::NonPositive {
            name: "effect",
            value: effect,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability {
            name: "alpha",
            value: alpha,
        });
    }

    let per_rep: Vec<Vec<RepOutcome>> = (0..reps)
        .into_par_iter()
        .map(|rep| replicate(config, metric, effect, methods, b, alpha, rep))
        .collect::<Result<_>>()?;

    let outcomes = methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let covered = per_rep.iter().filter(|r| r[mi].covered).count() as f64;
            let coverage = covered / reps as f64;
            let rate = match kind {
                HarnessKind::Aa => coverage,
                HarnessKind::Ab => 1.0 - coverage,
            };
            let mean_se =
                per_rep.iter().map(|r| r[mi].se_diff).sum::<f64>() / reps as f64;
            MethodOutcome {
                method,
                rate,
                rate_se: (rate * (1.0 - rate) / reps as f64).sqrt(),
                mean_se,
            }
        })
        .collect();

    Ok(HarnessResult {
        kind,
        metric,
        replications: reps,
        alpha,
        effect,
        b,
        seed: config.seed,
        outcomes,
    })
}

/// R simulated A/A experiments: 50/50 user split, no treatment effect.
/// Reports each method's empirical CI coverage of the true difference 0.
pub fn run_aa(
    config: &SynthConfig,
    reps: usize,
    metric: MetricKind,
    methods: &[SeMethod],
    b: usize,
    alpha: f64,
) -> Result<HarnessResult> {
    run_harness(config, HarnessKind::Aa, metric, 0.0, reps, methods, b, alpha)
}

/// R simulated A/B experiments: treatment basket values lifted by
/// `(1 + effect)`. Reports each method's empirical rejection rate.
pub fn run_ab(
    config: &SynthConfig,
    reps: usize,
    metric: MetricKind,
    effect: f64,
    methods: &[SeMethod],
    b: usize,
    alpha: f64,
) -> Result<HarnessResult> {
    run_harness(config, HarnessKind::Ab, metric, effect, reps, methods, b, alpha)
}
