//! Dataset parsing, cleaning, and summarization.
//!
//! Three adapters produce a [`Dataset`] plus a [`CleaningReport`]: a
//! generic delimited schema, the UCI Online Retail II export, and the
//! Olist Brazilian e-commerce CSV collection. Cleaning is deliberately
//! conventional (drop rows with no user, cancelled transactions, and
//! non-positive quantities or prices) and every drop is counted, so
//! `rows read = rows kept + rows dropped` holds for every adapter.

mod olist;
mod uci;

pub use olist::{parse_olist, CUSTOMERS_FILE, ITEMS_FILE, ORDERS_FILE};
pub use uci::parse_uci;

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, DatasetBuilder};

/// Distinct-entity counts and time span of a dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub users: usize,
    pub transactions: usize,
    pub units: u64,
    pub products: usize,
    /// Whole days between the first and last line-item instants.
    pub span_days: i64,
}

/// Counts of distinct ids, total units, and span in days.
pub fn summarize(dataset: &Dataset) -> Result<DatasetSummary> {
    let (start, end) = dataset.span().ok_or(Error::EmptyDataset)?;
    Ok(DatasetSummary {
        users: dataset.user_count(),
        transactions: dataset.transaction_count(),
        units: dataset.total_units(),
        products: dataset.product_count(),
        span_days: (end - start).num_days(),
    })
}

/// What happened to every input row during parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub rows_read: u64,
    pub rows_kept: u64,
    pub dropped_missing_user: u64,
    pub dropped_cancelled: u64,
    pub dropped_non_positive_quantity: u64,
    pub dropped_non_positive_price: u64,
    pub summary: DatasetSummary,
}

impl CleaningReport {
    pub fn dropped_total(&self) -> u64 {
        self.dropped_missing_user
            + self.dropped_cancelled
            + self.dropped_non_positive_quantity
            + self.dropped_non_positive_price
    }
}

/// One candidate line item offered to the cleaning rules.
pub(crate) struct RawRow<'a> {
    pub user: &'a str,
    pub transaction: &'a str,
    pub product: &'a str,
    pub unit_price: f64,
    pub quantity: i64,
    pub timestamp: chrono::NaiveDateTime,
    pub cancelled: bool,
}

/// Applies the cleaning rules in a fixed order and counts every outcome.
pub(crate) struct Cleaner {
    builder: DatasetBuilder,
    report: CleaningReport,
}

impl Cleaner {
    pub fn new() -> Self {
        Self {
            builder: DatasetBuilder::new(),
            report: CleaningReport::default(),
        }
    }

    /// Rules run in order: missing user, cancelled, quantity, price.
    pub fn offer(&mut self, row: RawRow<'_>) -> Result<()> {
        self.report.rows_read += 1;
        if row.user.trim().is_empty() {
            self.report.dropped_missing_user += 1;
            return Ok(());
        }
        if row.cancelled {
            self.report.dropped_cancelled += 1;
            return Ok(());
        }
        if row.quantity < 1 {
            self.report.dropped_non_positive_quantity += 1;
            return Ok(());
        }
        if !(row.unit_price > 0.0) || !row.unit_price.is_finite() {
            self.report.dropped_non_positive_price += 1;
            return Ok(());
        }
        let quantity = u32::try_from(row.quantity).map_err(|_| Error::InvalidLineItem {
            transaction: row.transaction.to_owned(),
            reason: format!("quantity {} exceeds the supported range", row.quantity),
        })?;
        self.report.rows_kept += 1;
        self.builder.push(
            row.user.trim(),
            row.transaction.trim(),
            row.product.trim(),
            row.unit_price,
            quantity,
            row.timestamp,
        )
    }

    pub fn finish(self) -> Result<(Dataset, CleaningReport)> {
        let dataset = self.builder.finish()?;
        let mut report = self.report;
        report.summary = if dataset.is_empty() {
            DatasetSummary::default()
        } else {
            summarize(&dataset)?
        };
        Ok((dataset, report))
    }
}

/// Timestamp formats accepted across adapters (timezone-naive).
const TIMESTAMP_FORMATS: [&str; 3] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"];

pub(crate) fn parse_timestamp(s: &str) -> Option<chrono::NaiveDateTime> {
    let s = s.trim();
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|fmt| chrono::NaiveDateTime::parse_from_str(s, fmt).ok())
}

pub(crate) fn row_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::RowParse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

pub(crate) fn column_index(
    headers: &csv::StringRecord,
    name: &str,
    path: &Path,
) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn {
            name: name.to_owned(),
            path: path.display().to_string(),
        })
}

/// Column names (and delimiter) for the generic delimited schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMapping {
    pub user: String,
    pub transaction: String,
    pub product: String,
    pub unit_price: String,
    pub quantity: String,
    pub timestamp: String,
    pub delimiter: char,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            user: "user_id".into(),
            transaction: "transaction_id".into(),
            product: "product_id".into(),
            unit_price: "unit_price".into(),
            quantity: "quantity".into(),
            timestamp: "timestamp".into(),
            delimiter: ',',
        }
    }
}

/// Parse a delimited file via an explicit column mapping.
///
/// Rows failing to parse at all (bad number, bad timestamp) are hard
/// errors naming the line; rows that parse but violate a cleaning rule
/// are dropped and counted.
pub fn parse_generic(path: &Path, mapping: &ColumnMapping) -> Result<(Dataset, CleaningReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter as u8)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let user = column_index(&headers, &mapping.user, path)?;
    let transaction = column_index(&headers, &mapping.transaction, path)?;
    let product = column_index(&headers, &mapping.product, path)?;
    let unit_price = column_index(&headers, &mapping.unit_price, path)?;
    let quantity = column_index(&headers, &mapping.quantity, path)?;
    let timestamp = column_index(&headers, &mapping.timestamp, path)?;

    let mut cleaner = Cleaner::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let price: f64 = field(unit_price)
            .trim()
            .parse()
            .map_err(|_| row_error(path, line, format!("bad price `{}`", field(unit_price))))?;
        let qty: i64 = field(quantity)
            .trim()
            .parse()
            .map_err(|_| row_error(path, line, format!("bad quantity `{}`", field(quantity))))?;
        let ts = parse_timestamp(field(timestamp))
            .ok_or_else(|| row_error(path, line, format!("bad timestamp `{}`", field(timestamp))))?;
        cleaner.offer(RawRow {
            user: field(user),
            transaction: field(transaction),
            product: field(product),
            unit_price: price,
            quantity: qty,
            timestamp: ts,
            cancelled: false,
        })?;
    }
    let (dataset, report) = cleaner.finish()?;
    if report.rows_read == 0 {
        return Err(Error::EmptyInput {
            path: path.display().to_string(),
        });
    }
    Ok((dataset, report))
}

/// Write a dataset in the generic schema: `user_id, transaction_id,
/// product_id, unit_price, quantity, timestamp` with ISO-8601 instants.
///
/// Prices round-trip exactly (shortest representation that parses back to
/// the same float), so export followed by [`parse_generic`] reproduces
/// the summary bit for bit.
pub fn export_generic_csv<W: io::Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "user_id",
        "transaction_id",
        "product_id",
        "unit_price",
        "quantity",
        "timestamp",
    ])?;
    for item in dataset.items() {
        w.write_record([
            dataset.users().name(item.user.0),
            dataset.txn_ids().name(item.transaction.0),
            dataset.products().name(item.product.0),
            // Display already picks the shortest exact round-trip form.
            &item.unit_price.to_string(),
            &item.quantity.to_string(),
            &item.timestamp.format("%Y-%m-%dT%H:%M:%S").to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
