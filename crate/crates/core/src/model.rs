//! Transaction data model and metric definitions.
//!
//! The analysis units differ by metric: ABV and ABS are per-transaction,
//! ASP is per sold unit. Randomization in the experiments this library
//! serves is per-user, so every response carries its user label (and, for
//! ASP, its product label) for cluster-aware resampling downstream.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{SeEstimate, SeMethod};
use crate::stats::{pearson, WeightedMoments};

/// Dense index of a user within a [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserIdx(pub u32);

/// Dense index of a transaction within a [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TxnIdx(pub u32);

/// Dense index of a product within a [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductIdx(pub u32);

/// Interning table mapping external string ids to dense indices.
#[derive(Debug, Clone, Default)]
pub struct IdTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdTable {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn name(&self, idx: u32) -> &str {
        &self.names[idx as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// One cleaned purchase row: a quantity of one product bought within one
/// transaction by one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineItem {
    pub user: UserIdx,
    pub transaction: TxnIdx,
    pub product: ProductIdx,
    /// Price of a single unit; positive after cleaning.
    pub unit_price: f64,
    /// Units bought at that price; at least 1 after cleaning.
    pub quantity: u32,
    pub timestamp: NaiveDateTime,
}

/// Per-transaction aggregation of its line items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransactionRecord {
    pub transaction: TxnIdx,
    pub user: UserIdx,
    /// Sum of `unit_price * quantity` over the transaction's line items.
    pub basket_value: f64,
    /// Sum of `quantity` over the transaction's line items.
    pub basket_size: u32,
    /// Earliest line-item instant in the transaction.
    pub timestamp: NaiveDateTime,
}

/// An immutable collection of line items, their per-transaction aggregation,
/// and the id/index structures shared by every estimator.
#[derive(Debug, Clone)]
pub struct Dataset {
    items: Vec<LineItem>,
    transactions: Vec<TransactionRecord>,
    users: IdTable,
    txns: IdTable,
    products: IdTable,
    /// Per user, that user's transactions ordered by (timestamp, id).
    user_transactions: Vec<Vec<TxnIdx>>,
    span: Option<(NaiveDateTime, NaiveDateTime)>,
}

/// Accumulates cleaned line items and finishes into a [`Dataset`].
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    users: IdTable,
    txns: IdTable,
    products: IdTable,
    items: Vec<LineItem>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append one cleaned line item. Ids are interned on first sight.
    pub fn push(
        &mut self,
        user: &str,
        transaction: &str,
        product: &str,
        unit_price: f64,
        quantity: u32,
        timestamp: NaiveDateTime,
    ) -> Result<()> {
        if quantity < 1 {
            return Err(Error::InvalidLineItem {
                transaction: transaction.to_owned(),
                reason: format!("quantity {quantity} must be at least 1"),
            });
        }
        if !(unit_price > 0.0) || !unit_price.is_finite() {
            return Err(Error::InvalidLineItem {
                transaction: transaction.to_owned(),
                reason: format!("unit price {unit_price} must be positive"),
            });
        }
        self.items.push(LineItem {
            user: UserIdx(self.users.intern(user)),
            transaction: TxnIdx(self.txns.intern(transaction)),
            product: ProductIdx(self.products.intern(product)),
            unit_price,
            quantity,
            timestamp,
        });
        Ok(())
    }

    /// Aggregate line items into transaction records and freeze the dataset.
    ///
    /// Fails if any transaction id appears under more than one user.
    pub fn finish(self) -> Result<Dataset> {
        let DatasetBuilder {
            users,
            txns,
            products,
            items,
        } = self;

        let n_txns = txns.len();
        let mut owner: Vec<Option<UserIdx>> = vec![None; n_txns];
        let mut value = vec![0.0f64; n_txns];
        let mut size = vec![0u64; n_txns];
        let mut first_ts: Vec<Option<NaiveDateTime>> = vec![None; n_txns];

        for item in &items {
            let t = item.transaction.0 as usize;
            match owner[t] {
                None => owner[t] = Some(item.user),
                Some(u) if u == item.user => {}
                Some(u) => {
                    return Err(Error::TransactionSpansUsers {
                        transaction: txns.name(item.transaction.0).to_owned(),
                        first_user: users.name(u.0).to_owned(),
                        second_user: users.name(item.user.0).to_owned(),
                    });
                }
            }
            value[t] += item.unit_price * f64::from(item.quantity);
            size[t] += u64::from(item.quantity);
            first_ts[t] = Some(match first_ts[t] {
                Some(ts) => ts.min(item.timestamp),
                None => item.timestamp,
            });
        }

        let transactions: Vec<TransactionRecord> = (0..n_txns)
            .map(|t| TransactionRecord {
                transaction: TxnIdx(t as u32),
                user: owner[t].expect("interned transaction with no items"),
                basket_value: value[t],
                basket_size: u32::try_from(size[t]).expect("basket size exceeds u32"),
                timestamp: first_ts[t].expect("interned transaction with no items"),
            })
            .collect();

        let mut user_transactions: Vec<Vec<TxnIdx>> = vec![Vec::new(); users.len()];
        for rec in &transactions {
            user_transactions[rec.user.0 as usize].push(rec.transaction);
        }
        for list in &mut user_transactions {
            list.sort_by(|a, b| {
                let (ta, tb) = (&transactions[a.0 as usize], &transactions[b.0 as usize]);
                ta.timestamp
                    .cmp(&tb.timestamp)
                    .then_with(|| txns.name(a.0).cmp(txns.name(b.0)))
            });
        }

        let span = items
            .iter()
            .map(|i| i.timestamp)
            .fold(None, |acc: Option<(NaiveDateTime, NaiveDateTime)>, ts| {
                Some(match acc {
                    Some((lo, hi)) => (lo.min(ts), hi.max(ts)),
                    None => (ts, ts),
                })
            });

        Ok(Dataset {
            items,
            transactions,
            users,
            txns,
            products,
            user_transactions,
            span,
        })
    }
}

impl Dataset {
    pub fn builder() -> DatasetBuilder {
        DatasetBuilder::new()
    }

    pub fn items(&self) -> &[LineItem] {
        &self.items
    }

    pub fn transactions(&self) -> &[TransactionRecord] {
        &self.transactions
    }

    pub fn transaction(&self, idx: TxnIdx) -> &TransactionRecord {
        &self.transactions[idx.0 as usize]
    }

    pub fn users(&self) -> &IdTable {
        &self.users
    }

    pub fn txn_ids(&self) -> &IdTable {
        &self.txns
    }

    pub fn products(&self) -> &IdTable {
        &self.products
    }

    /// Transactions of one user, ordered by (timestamp, transaction id).
    pub fn user_transactions(&self, user: UserIdx) -> &[TxnIdx] {
        &self.user_transactions[user.0 as usize]
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn transaction_count(&self) -> usize {
        self.transactions.len()
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total units sold across the dataset.
    pub fn total_units(&self) -> u64 {
        self.items.iter().map(|i| u64::from(i.quantity)).sum()
    }

    /// Total spend across the dataset.
    pub fn total_spend(&self) -> f64 {
        self.transactions.iter().map(|t| t.basket_value).sum()
    }

    /// Earliest and latest line-item instants, unless the dataset is empty.
    pub fn span(&self) -> Option<(NaiveDateTime, NaiveDateTime)> {
        self.span
    }

    /// The full-span window.
    pub fn full_window(&self) -> Result<TimeWindow> {
        let (start, end) = self.span.ok_or(Error::EmptyDataset)?;
        Ok(TimeWindow { start, end })
    }

    /// Expanding window from day one covering `fraction` of the span.
    pub fn window_fraction(&self, fraction: f64) -> Result<TimeWindow> {
        let (start, end) = self.span.ok_or(Error::EmptyDataset)?;
        let fraction = fraction.clamp(0.0, 1.0);
        let nanos = (end - start)
            .num_nanoseconds()
            .expect("span duration overflows i64 nanoseconds");
        let offset = chrono::Duration::nanoseconds((nanos as f64 * fraction).round() as i64);
        Ok(TimeWindow {
            start,
            end: start + offset,
        })
    }
}

/// Closed time interval used to restrict analysis to a prefix of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
}

impl TimeWindow {
    pub fn contains(&self, ts: NaiveDateTime) -> bool {
        self.start <= ts && ts <= self.end
    }
}

/// The three e-commerce decision metrics.
///
/// Each metric fixes an analysis unit, a response value, and the cluster
/// structure its responses inherit from the randomization design:
///
/// | metric | analysis unit | response      | clusters        |
/// |--------|---------------|---------------|-----------------|
/// | ABV    | transaction   | basket value  | user            |
/// | ABS    | transaction   | basket size   | user            |
/// | ASP    | sold unit     | unit price    | user and product|
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// Average basket value: mean spend per transaction.
    #[serde(rename = "abv")]
    Abv,
    /// Average basket size: mean units per transaction.
    #[serde(rename = "abs")]
    Abs,
    /// Average selling price: mean price per sold unit.
    #[serde(rename = "asp")]
    Asp,
}

impl MetricKind {
    /// Whether responses carry a product cluster label in addition to user.
    pub fn has_product_clusters(self) -> bool {
        matches!(self, MetricKind::Asp)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Abv => "abv",
            MetricKind::Abs => "abs",
            MetricKind::Asp => "asp",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abv" => Ok(MetricKind::Abv),
            "abs" => Ok(MetricKind::Abs),
            "asp" => Ok(MetricKind::Asp),
            other => Err(Error::InvalidConfig(format!("unknown metric `{other}`"))),
        }
    }
}

/// A metric's response vector with cluster labels and frequency weights.
///
/// ASP responses are unit-weighted: a line item with quantity `q` appears
/// once with weight `q` instead of being materialized `q` times. All
/// moments treat weights as frequency counts, so the weighted and the
/// expanded representations agree exactly.
#[derive(Debug, Clone)]
pub struct ResponseSample {
    metric: MetricKind,
    values: Vec<f64>,
    weights: Vec<f64>,
    /// Compact user-cluster label per response, in [0, user_cluster_count).
    user_clusters: Vec<u32>,
    /// Compact product-cluster label per response; empty unless ASP.
    product_clusters: Vec<u32>,
    user_cluster_count: usize,
    product_cluster_count: usize,
    n: f64,
    mean: f64,
    variance: f64,
}

impl ResponseSample {
    fn build(
        metric: MetricKind,
        values: Vec<f64>,
        weights: Vec<f64>,
        user_clusters: Vec<u32>,
        product_clusters: Vec<u32>,
        user_cluster_count: usize,
        product_cluster_count: usize,
    ) -> Self {
        let moments: WeightedMoments = values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| (v, w))
            .collect();
        Self {
            metric,
            values,
            weights,
            user_clusters,
            product_clusters,
            user_cluster_count,
            product_cluster_count,
            n: moments.count(),
            mean: moments.mean(),
            variance: moments.sample_variance(),
        }
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn user_clusters(&self) -> &[u32] {
        &self.user_clusters
    }

    pub fn product_clusters(&self) -> &[u32] {
        &self.product_clusters
    }

    pub fn user_cluster_count(&self) -> usize {
        self.user_cluster_count
    }

    pub fn product_cluster_count(&self) -> usize {
        self.product_cluster_count
    }

    /// Number of stored (weighted) response rows.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Effective sample size: the total frequency weight.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Weighted sample mean.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Weighted sample variance, (n - 1) denominator.
    pub fn sample_variance(&self) -> f64 {
        self.variance
    }
}

/// Assigns compact cluster ids in first-seen order, so samples built from
/// the same dataset walk are reproducible.
#[derive(Default)]
struct Compactor {
    map: HashMap<u32, u32>,
}

impl Compactor {
    fn get(&mut self, raw: u32) -> u32 {
        let next = self.map.len() as u32;
        *self.map.entry(raw).or_insert(next)
    }

    fn len(&self) -> usize {
        self.map.len()
    }
}

/// Extract the response vector of `metric` over `window`.
///
/// ABV yields one response per in-window transaction valued at its basket
/// value, ABS one per transaction valued at its basket size, ASP one per
/// line item valued at its unit price with weight equal to its quantity.
/// A line item is in-window when its transaction's timestamp is.
pub fn responses_for_metric(
    dataset: &Dataset,
    metric: MetricKind,
    window: TimeWindow,
) -> Result<ResponseSample> {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let mut user_clusters = Vec::new();
    let mut product_clusters = Vec::new();
    let mut users = Compactor::default();
    let mut products = Compactor::default();

    match metric {
        MetricKind::Abv | MetricKind::Abs => {
            for rec in dataset.transactions() {
                if !window.contains(rec.timestamp) {
                    continue;
                }
                let value = match metric {
                    MetricKind::Abv => rec.basket_value,
                    MetricKind::Abs => f64::from(rec.basket_size),
                    MetricKind::Asp => unreachable!(),
                };
                values.push(value);
                weights.push(1.0);
                user_clusters.push(users.get(rec.user.0));
            }
        }
        MetricKind::Asp => {
            for item in dataset.items() {
                let rec = dataset.transaction(item.transaction);
                if !window.contains(rec.timestamp) {
                    continue;
                }
                values.push(item.unit_price);
                weights.push(f64::from(item.quantity));
                user_clusters.push(users.get(item.user.0));
                product_clusters.push(products.get(item.product.0));
            }
        }
    }

    if values.is_empty() {
        return Err(Error::EmptySample {
            start: window.start.to_string(),
            end: window.end.to_string(),
        });
    }

    Ok(ResponseSample::build(
        metric,
        values,
        weights,
        user_clusters,
        product_clusters,
        users.len(),
        products.len(),
    ))
}

/// The i.i.d. standard error `sqrt(s^2 / n)` with frequency-weighted `s^2`.
///
/// This is the estimate a plain t-test uses; it understates the true SE
/// whenever responses within a user cluster are positively correlated.
pub fn vanilla_se(sample: &ResponseSample) -> Result<SeEstimate> {
    if sample.n() < 2.0 {
        return Err(Error::InsufficientSample {
            n: sample.n(),
            needed: 2.0,
        });
    }
    let se = (sample.sample_variance() / sample.n()).sqrt();
    Ok(SeEstimate::new(se, SeMethod::Vanilla))
}

/// Paired consecutive transactions and their pooled Pearson correlation.
#[derive(Debug, Clone)]
pub struct LagCorrelation {
    /// Pearson correlation over all pooled (value, next value) pairs.
    pub correlation: f64,
    /// The pooled pairs, normalized by the dataset-level metric mean.
    pub pairs: Vec<(f64, f64)>,
}

/// Correlation between a user's transaction value/size and their next one.
///
/// For each user, consecutive transactions (ordered by timestamp, ties by
/// transaction id) form overlapping pairs which are pooled across users.
/// Both coordinates are normalized by the whole-dataset ABV or ABS so the
/// diagonal reads in multiples of the metric. Positive correlation here is
/// exactly the within-user dependence that invalidates the vanilla SE.
pub fn lag_correlation(dataset: &Dataset, metric: MetricKind) -> Result<LagCorrelation> {
    let response = |rec: &TransactionRecord| -> f64 {
        match metric {
            MetricKind::Abv => rec.basket_value,
            MetricKind::Abs => f64::from(rec.basket_size),
            MetricKind::Asp => unreachable!(),
        }
    };
    let normalizer = match metric {
        MetricKind::Abv => dataset.total_spend() / dataset.transaction_count() as f64,
        MetricKind::Abs => dataset.total_units() as f64 / dataset.transaction_count() as f64,
        MetricKind::Asp => {
            return Err(Error::UnsupportedMetric {
                metric: metric.to_string(),
                method: "lag correlation".to_owned(),
                reason: "consecutive-transaction pairing is defined per basket".to_owned(),
            })
        }
    };

    let mut pairs = Vec::new();
    for user in 0..dataset.user_count() {
        let txns = dataset.user_transactions(UserIdx(user as u32));
        for pair in txns.windows(2) {
            let a = response(dataset.transaction(pair[0])) / normalizer;
            let b = response(dataset.transaction(pair[1])) / normalizer;
            pairs.push((a, b));
        }
    }

    if pairs.is_empty() {
        return Err(Error::NoLagPairs);
    }
    Ok(LagCorrelation {
        correlation: pearson(&pairs),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use chrono::NaiveDate;

    pub(crate) fn ts(day: u32, hour: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2024, 1, day)
            .unwrap()
            .and_hms_opt(hour, 0, 0)
            .unwrap()
    }

    fn simple_dataset() -> Dataset {
        // user a: txn t1 (10x2 + 5x1), txn t2 (30x1)
        // user b: txn t3 (7x1)
        let mut b = Dataset::builder();
        b.push("a", "t1", "p1", 10.0, 2, ts(1, 9)).unwrap();
        b.push("a", "t1", "p2", 5.0, 1, ts(1, 10)).unwrap();
        b.push("a", "t2", "p1", 30.0, 1, ts(2, 9)).unwrap();
        b.push("b", "t3", "p3", 7.0, 1, ts(3, 9)).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn aggregates_baskets() {
        let ds = simple_dataset();
        assert_eq!(ds.transaction_count(), 3);
        let t1 = ds.transaction(TxnIdx(0));
        assert_relative_eq!(t1.basket_value, 25.0);
        assert_eq!(t1.basket_size, 3);
        assert_eq!(t1.timestamp, ts(1, 9));
        let t3 = ds.transaction(TxnIdx(2));
        assert_relative_eq!(t3.basket_value, 7.0);
        assert_eq!(t3.basket_size, 1);
    }

    #[test]
    fn rejects_transaction_spanning_users() {
        let mut b = Dataset::builder();
        b.push("a", "t1", "p1", 1.0, 1, ts(1, 0)).unwrap();
        b.push("b", "t1", "p1", 1.0, 1, ts(1, 1)).unwrap();
        let err = b.finish().unwrap_err();
        match err {
            Error::TransactionSpansUsers { transaction, .. } => assert_eq!(transaction, "t1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn rejects_invalid_line_items() {
        let mut b = Dataset::builder();
        assert!(b.push("a", "t", "p", 0.0, 1, ts(1, 0)).is_err());
        assert!(b.push("a", "t", "p", -2.0, 1, ts(1, 0)).is_err());
        assert!(b.push("a", "t", "p", 1.0, 0, ts(1, 0)).is_err());
    }

    #[test]
    fn abv_responses() {
        let ds = simple_dataset();
        let window = ds.full_window().unwrap();
        let sample = responses_for_metric(&ds, MetricKind::Abv, window).unwrap();
        assert_eq!(sample.len(), 3);
        assert_relative_eq!(sample.n(), 3.0);
        // baskets 25, 30, 7
        assert_relative_eq!(sample.mean(), (25.0 + 30.0 + 7.0) / 3.0);
        assert_eq!(sample.user_cluster_count(), 2);
    }

    #[test]
    fn asp_weighted_representation() {
        // one line item price 4 qty 5 -> n=5, mean=4, one stored response
        let mut b = Dataset::builder();
        b.push("a", "t1", "p1", 4.0, 5, ts(1, 0)).unwrap();
        let ds = b.finish().unwrap();
        let sample =
            responses_for_metric(&ds, MetricKind::Asp, ds.full_window().unwrap()).unwrap();
        assert_eq!(sample.len(), 1);
        assert_relative_eq!(sample.n(), 5.0);
        assert_relative_eq!(sample.mean(), 4.0);
        assert_eq!(sample.product_cluster_count(), 1);
    }

    #[test]
    fn asp_weighted_matches_materialized_expansion() {
        // The frequency-weight form must agree with expanding every unit
        // into its own response. Feasible only for small unit totals, which
        // is exactly why the weighted form exists.
        let mut b = Dataset::builder();
        for i in 0u32..60 {
            let user = format!("u{}", i % 7);
            let price = 1.0 + f64::from(i) * 0.37;
            let qty = 1 + (i * i) % 9;
            b.push(&user, &format!("t{i}"), &format!("p{}", i % 5), price, qty, ts(1, i % 24))
                .unwrap();
        }
        let ds = b.finish().unwrap();
        let sample =
            responses_for_metric(&ds, MetricKind::Asp, ds.full_window().unwrap()).unwrap();

        let expanded: Vec<f64> = sample
            .values()
            .iter()
            .zip(sample.weights())
            .flat_map(|(&v, &w)| std::iter::repeat(v).take(w as usize))
            .collect();
        assert!(expanded.len() <= 10_000);
        assert_relative_eq!(sample.n(), expanded.len() as f64);

        let mean = expanded.iter().sum::<f64>() / expanded.len() as f64;
        let var = expanded.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (expanded.len() - 1) as f64;
        assert_relative_eq!(sample.mean(), mean, max_relative = 1e-9);
        assert_relative_eq!(sample.sample_variance(), var, max_relative = 1e-9);

        let est = vanilla_se(&sample).unwrap();
        assert_relative_eq!(est.se, (var / expanded.len() as f64).sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn window_before_first_timestamp_is_empty() {
        let ds = simple_dataset();
        let window = TimeWindow {
            start: ts(1, 0) - chrono::Duration::days(10),
            end: ts(1, 0) - chrono::Duration::days(9),
        };
        assert!(matches!(
            responses_for_metric(&ds, MetricKind::Abv, window),
            Err(Error::EmptySample { .. })
        ));
    }

    #[test]
    fn vanilla_se_hand_computed() {
        // responses [1,2,3] -> s^2 = 1, SE = sqrt(1/3)
        let mut b = Dataset::builder();
        b.push("u1", "t1", "p", 1.0, 1, ts(1, 0)).unwrap();
        b.push("u2", "t2", "p", 2.0, 1, ts(2, 0)).unwrap();
        b.push("u3", "t3", "p", 3.0, 1, ts(3, 0)).unwrap();
        let ds = b.finish().unwrap();
        let sample =
            responses_for_metric(&ds, MetricKind::Abv, ds.full_window().unwrap()).unwrap();
        let est = vanilla_se(&sample).unwrap();
        assert_relative_eq!(est.se, (1.0f64 / 3.0).sqrt(), max_relative = 1e-12);
        assert_eq!(est.method, SeMethod::Vanilla);
    }

    #[test]
    fn vanilla_se_zero_variance() {
        let mut b = Dataset::builder();
        for i in 0..4 {
            b.push("u", &format!("t{i}"), "p", 5.0, 1, ts(1 + i, 0)).unwrap();
        }
        let ds = b.finish().unwrap();
        let sample =
            responses_for_metric(&ds, MetricKind::Abv, ds.full_window().unwrap()).unwrap();
        assert_relative_eq!(vanilla_se(&sample).unwrap().se, 0.0);
    }

    #[test]
    fn vanilla_se_insufficient_sample() {
        let mut b = Dataset::builder();
        b.push("u", "t", "p", 5.0, 1, ts(1, 0)).unwrap();
        let ds = b.finish().unwrap();
        let sample =
            responses_for_metric(&ds, MetricKind::Abv, ds.full_window().unwrap()).unwrap();
        assert!(matches!(
            vanilla_se(&sample),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn accounting_identities() {
        let ds = simple_dataset();
        let w = ds.full_window().unwrap();
        let abv = responses_for_metric(&ds, MetricKind::Abv, w).unwrap();
        let abs = responses_for_metric(&ds, MetricKind::Abs, w).unwrap();
        let asp = responses_for_metric(&ds, MetricKind::Asp, w).unwrap();
        let txn_count = ds.transaction_count() as f64;
        assert_relative_eq!(abv.mean() * txn_count, ds.total_spend(), max_relative = 1e-12);
        assert_relative_eq!(
            abs.mean() * txn_count,
            ds.total_units() as f64,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            asp.mean() * ds.total_units() as f64,
            ds.total_spend(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lag_correlation_requires_repeat_users() {
        let mut b = Dataset::builder();
        b.push("a", "t1", "p", 1.0, 1, ts(1, 0)).unwrap();
        b.push("b", "t2", "p", 2.0, 1, ts(2, 0)).unwrap();
        let ds = b.finish().unwrap();
        assert!(matches!(
            lag_correlation(&ds, MetricKind::Abv),
            Err(Error::NoLagPairs)
        ));
    }

    #[test]
    fn lag_correlation_identical_repeat_baskets() {
        // Two users, each repeating their own identical basket: every pair
        // sits on the diagonal, so the pooled correlation is exactly 1.
        let mut b = Dataset::builder();
        for (user, price) in [("a", 10.0), ("b", 40.0)] {
            for i in 0..3 {
                b.push(user, &format!("{user}{i}"), "p", price, 1, ts(1 + i, 0))
                    .unwrap();
            }
        }
        let ds = b.finish().unwrap();
        let lag = lag_correlation(&ds, MetricKind::Abv).unwrap();
        assert_eq!(lag.pairs.len(), 4);
        assert_relative_eq!(lag.correlation, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn lag_correlation_orders_by_time_then_id() {
        // Same timestamps force the lexicographic tie-break.
        let mut b = Dataset::builder();
        b.push("a", "t-b", "p", 20.0, 1, ts(1, 0)).unwrap();
        b.push("a", "t-a", "p", 10.0, 1, ts(1, 0)).unwrap();
        b.push("a", "t-c", "p", 30.0, 1, ts(2, 0)).unwrap();
        let ds = b.finish().unwrap();
        let lag = lag_correlation(&ds, MetricKind::Abv).unwrap();
        let abv = ds.total_spend() / 3.0;
        let raw: Vec<(f64, f64)> = lag
            .pairs
            .iter()
            .map(|&(a, b)| (a * abv, b * abv))
            .collect();
        assert_relative_eq!(raw[0].0, 10.0, max_relative = 1e-12);
        assert_relative_eq!(raw[0].1, 20.0, max_relative = 1e-12);
        assert_relative_eq!(raw[1].0, 20.0, max_relative = 1e-12);
        assert_relative_eq!(raw[1].1, 30.0, max_relative = 1e-12);
    }

    #[test]
    fn asp_rejected_for_lag_correlation() {
        let ds = simple_dataset();
        assert!(matches!(
            lag_correlation(&ds, MetricKind::Asp),
            Err(Error::UnsupportedMetric { .. })
        ));
    }
}
