//! Standard-error estimates tagged with the method that produced them.

use serde::{Deserialize, Serialize};
use std::fmt;

/// How a standard error was estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeMethod {
    /// `sqrt(s^2 / n)`, unbiased only under i.i.d. responses.
    #[serde(rename = "vanilla")]
    Vanilla,
    /// Poisson bootstrap reweighting whole user clusters.
    #[serde(rename = "bootstrap-one-way")]
    BootstrapOneWay,
    /// Poisson bootstrap with independent user and product weights.
    #[serde(rename = "bootstrap-multi-way")]
    BootstrapMultiWay,
    /// Delta-method variance of a quotient of user-level means.
    #[serde(rename = "delta")]
    Delta,
}

impl fmt::Display for SeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SeMethod::Vanilla => "vanilla",
            SeMethod::BootstrapOneWay => "bootstrap-one-way",
            SeMethod::BootstrapMultiWay => "bootstrap-multi-way",
            SeMethod::Delta => "delta",
        };
        f.write_str(name)
    }
}

/// A standard-error value plus the provenance needed to interpret it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeEstimate {
    /// The estimated standard error of the metric mean.
    pub se: f64,
    pub method: SeMethod,
    /// Number of bootstrap resamples used, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    /// Coefficient of variation of the SE estimate itself (resampling noise).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<f64>,
    /// This estimate divided by the vanilla sample SE on the same sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_to_vanilla: Option<f64>,
    /// Master seed of the resampling run, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SeEstimate {
    pub fn new(se: f64, method: SeMethod) -> Self {
        debug_assert!(se >= 0.0);
        Self {
            se,
            method,
            b: None,
            cv: None,
            ratio_to_vanilla: None,
            seed: None,
        }
    }

    pub fn with_b(mut self, b: usize) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_cv(mut self, cv: f64) -> Self {
        debug_assert!(cv >= 0.0);
        self.cv = Some(cv);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Attach the ratio of this estimate to a vanilla SE on the same sample.
    pub fn with_ratio_to(mut self, vanilla_se: f64) -> Self {
        if vanilla_se > 0.0 {
            self.ratio_to_vanilla = Some(self.se / vanilla_se);
        }
        self
    }
}
