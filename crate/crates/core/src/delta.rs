//! Delta-method SE for transaction metrics written as quotients of
//! user-level totals.
//!
//! ABV is total spend over total baskets; grouping both totals by user
//! turns the metric into a ratio of two user-level means. Users are the
//! independent sampling units, so a first-order Taylor expansion of that
//! ratio yields a closed-form SE that accounts for within-user dependence
//! without any resampling. ASP is deliberately not offered here: its
//! product-level dependence has no user-quotient representation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{SeEstimate, SeMethod};
use crate::model::{Dataset, MetricKind, TimeWindow, UserIdx};

/// One user's in-window totals for a quotient metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserAggregate {
    pub user_id: String,
    /// Total spend (ABV) or total units (ABS) across the user's baskets.
    pub numerator: f64,
    /// Number of baskets.
    pub denominator: f64,
}

/// Per-user totals whose quotient of grand means reproduces the metric.
///
/// Users with no in-window transactions are excluded. Only the
/// per-transaction metrics are supported; ASP's analysis unit is the sold
/// unit and does not reduce to a per-user basket quotient.
pub fn user_level_aggregates(
    dataset: &Dataset,
    metric: MetricKind,
    window: TimeWindow,
) -> Result<Vec<UserAggregate>> {
    if metric == MetricKind::Asp {
        return Err(unsupported_asp());
    }
    let mut numerator = vec![0.0f64; dataset.user_count()];
    let mut baskets = vec![0u64; dataset.user_count()];
    let mut seen = vec![false; dataset.user_count()];
    for rec in dataset.transactions() {
        if !window.contains(rec.timestamp) {
            continue;
        }
        let u = rec.user.0 as usize;
        numerator[u] += match metric {
            MetricKind::Abv => rec.basket_value,
            MetricKind::Abs => f64::from(rec.basket_size),
            MetricKind::Asp => unreachable!(),
        };
        baskets[u] += 1;
        seen[u] = true;
    }
    let aggregates: Vec<UserAggregate> = (0..dataset.user_count())
        .filter(|&u| seen[u])
        .map(|u| UserAggregate {
            user_id: dataset.users().name(UserIdx(u as u32).0).to_owned(),
            numerator: numerator[u],
            denominator: baskets[u] as f64,
        })
        .collect();
    if aggregates.is_empty() {
        return Err(Error::EmptySample {
            start: window.start.to_string(),
            end: window.end.to_string(),
        });
    }
    Ok(aggregates)
}

fn unsupported_asp() -> Error {
    Error::UnsupportedMetric {
        metric: MetricKind::Asp.to_string(),
        method: "delta".to_owned(),
        reason: "per-unit responses with product-level dependence do not reduce to a \
                 quotient of user-level means"
            .to_owned(),
    }
}

/// Delta-method SE of the quotient of user-level means.
///
/// With per-user pairs (S_u, N_u), n users, means S-bar and N-bar, and
/// (n-1)-denominator sample moments,
///
/// ```text
/// SE^2 = [Var(S) - 2 R Cov(S, N) + R^2 Var(N)] / (n N-bar^2),  R = S-bar / N-bar
/// ```
///
/// The middle term is the explicit dependence correction: a plain i.i.d.
/// SE over transactions has no counterpart for it.
pub fn delta_se(aggregates: &[UserAggregate]) -> Result<SeEstimate> {
    let n = aggregates.len();
    if n < 2 {
        return Err(Error::InsufficientSample {
            n: n as f64,
            needed: 2.0,
        });
    }
    let nf = n as f64;
    let s_bar = aggregates.iter().map(|a| a.numerator).sum::<f64>() / nf;
    let n_bar = aggregates.iter().map(|a| a.denominator).sum::<f64>() / nf;
    if !(n_bar > 0.0) {
        return Err(Error::NonPositive {
            name: "mean denominator",
            value: n_bar,
        });
    }
    let mut var_s = 0.0;
    let mut var_n = 0.0;
    let mut cov = 0.0;
    for a in aggregates {
        let ds = a.numerator - s_bar;
        let dn = a.denominator - n_bar;
        var_s += ds * ds;
        var_n += dn * dn;
        cov += ds * dn;
    }
    let denom = nf - 1.0;
    var_s /= denom;
    var_n /= denom;
    cov /= denom;

    let r = s_bar / n_bar;
    let var_quotient = (var_s - 2.0 * r * cov + r * r * var_n) / (nf * n_bar * n_bar);
    // First-order variance can cancel to a hair below zero.
    Ok(SeEstimate::new(var_quotient.max(0.0).sqrt(), SeMethod::Delta))
}

/// Aggregate and estimate in one step.
pub fn delta_se_for_metric(
    dataset: &Dataset,
    metric: MetricKind,
    window: TimeWindow,
) -> Result<SeEstimate> {
    let aggregates = user_level_aggregates(dataset, metric, window)?;
    delta_se(&aggregates)
}
