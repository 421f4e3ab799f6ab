//! Olist Brazilian e-commerce adapter.
//!
//! The collection splits one logical dataset over several files. Users
//! are identified by the stable cross-order `customer_unique_id` (the
//! per-order `customer_id` is unique per order and would hide every
//! returning buyer); transactions are orders; each order-item row is one
//! line item with quantity 1.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::{column_index, parse_timestamp, row_error, Cleaner, CleaningReport, RawRow};
use crate::model::Dataset;

pub const ORDERS_FILE: &str = "olist_orders_dataset.csv";
pub const ITEMS_FILE: &str = "olist_order_items_dataset.csv";
pub const CUSTOMERS_FILE: &str = "olist_customers_dataset.csv";

struct OrderInfo {
    user: String,
    timestamp: chrono::NaiveDateTime,
    cancelled: bool,
}

fn member(dir: &Path, name: &str) -> Result<std::path::PathBuf> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(Error::MissingFile {
            name: name.to_owned(),
            dir: dir.display().to_string(),
        });
    }
    Ok(path)
}

fn load_customers(dir: &Path) -> Result<HashMap<String, String>> {
    let path = member(dir, CUSTOMERS_FILE)?;
    let mut reader = csv::ReaderBuilder::new().from_path(&path)?;
    let headers = reader.headers()?.clone();
    let id = column_index(&headers, "customer_id", &path)?;
    let unique = column_index(&headers, "customer_unique_id", &path)?;
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let key = record.get(id).unwrap_or("").trim();
        let value = record.get(unique).unwrap_or("").trim();
        if !key.is_empty() && !value.is_empty() {
            map.insert(key.to_owned(), value.to_owned());
        }
    }
    Ok(map)
}

fn load_orders(dir: &Path, customers: &HashMap<String, String>) -> Result<HashMap<String, OrderInfo>> {
    let path = member(dir, ORDERS_FILE)?;
    let mut reader = csv::ReaderBuilder::new().from_path(&path)?;
    let headers = reader.headers()?.clone();
    let order_id = column_index(&headers, "order_id", &path)?;
    let customer_id = column_index(&headers, "customer_id", &path)?;
    let status = column_index(&headers, "order_status", &path)?;
    let purchased = column_index(&headers, "order_purchase_timestamp", &path)?;
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let id = field(order_id);
        if id.is_empty() {
            continue;
        }
        let timestamp = parse_timestamp(field(purchased)).ok_or_else(|| {
            row_error(&path, line, format!("bad timestamp `{}`", field(purchased)))
        })?;
        let user = customers.get(field(customer_id)).cloned().unwrap_or_default();
        map.insert(
            id.to_owned(),
            OrderInfo {
                user,
                timestamp,
                cancelled: field(status).eq_ignore_ascii_case("canceled"),
            },
        );
    }
    Ok(map)
}

/// Parse an Olist CSV collection directory.
///
/// Dropped: item rows of cancelled orders, rows whose order or user
/// cannot be resolved, and non-positive prices. Orders without items
/// contribute no rows and are therefore never counted.
pub fn parse_olist(dir: &Path) -> Result<(Dataset, CleaningReport)> {
    let customers = load_customers(dir)?;
    let orders = load_orders(dir, &customers)?;

    let path = member(dir, ITEMS_FILE)?;
    let mut reader = csv::ReaderBuilder::new().from_path(&path)?;
    let headers = reader.headers()?.clone();
    let order_id = column_index(&headers, "order_id", &path)?;
    let product_id = column_index(&headers, "product_id", &path)?;
    let price = column_index(&headers, "price", &path)?;

    let missing = OrderInfo {
        user: String::new(),
        timestamp: chrono::NaiveDateTime::MIN,
        cancelled: false,
    };
    let mut cleaner = Cleaner::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let order = orders.get(field(order_id)).unwrap_or(&missing);
        let unit_price: f64 = field(price)
            .parse()
            .map_err(|_| row_error(&path, line, format!("bad price `{}`", field(price))))?;
        cleaner.offer(RawRow {
            user: &order.user,
            transaction: field(order_id),
            product: field(product_id),
            unit_price,
            quantity: 1,
            timestamp: order.timestamp,
            cancelled: order.cancelled,
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
