use thiserror::Error;

/// Errors produced by dataset construction, estimation, and inference.
#[derive(Debug, Error)]
pub enum Error {
    /// A transaction id appeared under more than one user id.
    #[error("transaction `{transaction}` spans users `{first_user}` and `{second_user}`")]
    TransactionSpansUsers {
        transaction: String,
        first_user: String,
        second_user: String,
    },

    /// A line item failed the basic validity rules (quantity >= 1, price > 0).
    #[error("invalid line item at transaction `{transaction}`: {reason}")]
    InvalidLineItem { transaction: String, reason: String },

    /// The requested window contains no responses.
    #[error("window [{start}, {end}] contains no responses")]
    EmptySample { start: String, end: String },

    /// The sample is too small for the requested estimator.
    #[error("sample of weighted size {n} is too small (need at least {needed})")]
    InsufficientSample { n: f64, needed: f64 },

    /// No user in the dataset has two or more transactions.
    #[error("no user has two or more transactions; lag correlation is undefined")]
    NoLagPairs,

    /// Operation requires a non-empty dataset.
    #[error("dataset is empty")]
    EmptyDataset,

    /// The metric is not supported by the requested method.
    #[error("metric {metric} is not supported by {method}: {reason}")]
    UnsupportedMetric {
        metric: String,
        method: String,
        reason: String,
    },

    /// A configuration invariant was violated.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A probability argument fell outside (0, 1).
    #[error("probability {value} for `{name}` must lie strictly inside (0, 1)")]
    InvalidProbability { name: &'static str, value: f64 },

    /// A strictly positive argument was zero or negative.
    #[error("`{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// A named column is missing from the input header.
    #[error("column `{name}` not found in header of {path}")]
    MissingColumn { name: String, path: String },

    /// A row could not be parsed.
    #[error("{path}:{line}: {message}")]
    RowParse {
        path: String,
        line: u64,
        message: String,
    },

    /// The input file holds no data rows.
    #[error("input file {path} holds no data rows")]
    EmptyInput { path: String },

    /// An expected member file of a multi-file dataset is absent.
    #[error("missing member file `{name}` in {dir}")]
    MissingFile { name: String, dir: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
