//! Decision metrics for e-commerce experiments with standard errors that
//! respect the randomization design.
//!
//! Online-store experiments randomize by user, but the metrics that drive
//! launch decisions live at finer grains: average basket value (ABV) and
//! average basket size (ABS) are per-transaction means, average selling
//! price (ASP) is a per-sold-unit mean. Repeat buyers make those responses
//! correlated within a user, so the i.i.d. ("vanilla") standard error can
//! understate the truth severalfold and nominally significant results stop
//! replicating. This crate computes the metrics and three cluster-aware
//! standard errors: a one-way Poisson bootstrap over users, a multi-way
//! Poisson bootstrap over users and products for ASP, and a closed-form
//! delta-method SE for the per-transaction ratio metrics. Power and
//! confidence-interval coverage routines quantify what an understated SE
//! costs, and a synthetic-data harness validates the whole pipeline
//! end to end.

pub mod delta;
pub mod error;
pub mod estimate;
pub mod inference;
pub mod ingest;
pub mod model;
pub mod resampling;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
pub use estimate::{SeEstimate, SeMethod};
pub use model::{Dataset, DatasetBuilder, MetricKind, ResponseSample, TimeWindow};

// Every code block in the guide compiles and runs under `cargo test --doc`,
// so the book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/bootstrap.md")]
    mod bootstrap {}
    #[doc = include_str!("../../../book/src/delta-method.md")]
    mod delta_method {}
    #[doc = include_str!("../../../book/src/power-coverage.md")]
    mod power_coverage {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
