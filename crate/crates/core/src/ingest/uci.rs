//! UCI Online Retail II adapter.

use std::path::Path;

use crate::error::Result;
use crate::ingest::{column_index, parse_timestamp, row_error, Cleaner, CleaningReport, RawRow};
use crate::model::Dataset;

/// Invoices beginning with this letter are cancellations.
const CANCELLATION_LETTER: char = 'C';

/// Parse the UCI Online Retail II CSV export.
///
/// Mapping: user = `Customer ID`, transaction = `Invoice`, product =
/// `StockCode`. Dropped: rows with no customer id, cancelled invoices
/// (invoice code starting with `C`), non-positive quantities, and
/// non-positive prices.
pub fn parse_uci(path: &Path) -> Result<(Dataset, CleaningReport)> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let headers = reader.headers()?.clone();
    let invoice = column_index(&headers, "Invoice", path)?;
    let stock_code = column_index(&headers, "StockCode", path)?;
    let quantity = column_index(&headers, "Quantity", path)?;
    let invoice_date = column_index(&headers, "InvoiceDate", path)?;
    let price = column_index(&headers, "Price", path)?;
    let customer = column_index(&headers, "Customer ID", path)?;

    let mut cleaner = Cleaner::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let user = field(customer);
        // A row with no user is dropped before anything else is parsed,
        // so sparse rows never abort a full-file ingest.
        if user.trim().is_empty() {
            cleaner.offer(RawRow {
                user,
                transaction: "",
                product: "",
                unit_price: 0.0,
                quantity: 0,
                timestamp: chrono::NaiveDateTime::MIN,
                cancelled: false,
            })?;
            continue;
        }
        let unit_price: f64 = field(price)
            .trim()
            .parse()
            .map_err(|_| row_error(path, line, format!("bad price `{}`", field(price))))?;
        let qty: i64 = field(quantity)
            .trim()
            .parse()
            .map_err(|_| row_error(path, line, format!("bad quantity `{}`", field(quantity))))?;
        let ts = parse_timestamp(field(invoice_date)).ok_or_else(|| {
            row_error(
                path,
                line,
                format!("bad timestamp `{}`", field(invoice_date)),
            )
        })?;
        let txn = field(invoice);
        cleaner.offer(RawRow {
            user,
            transaction: txn,
            product: field(stock_code),
            unit_price,
            quantity: qty,
            timestamp: ts,
            cancelled: txn.trim().starts_with(CANCELLATION_LETTER),
        })?;
    }
    let (dataset, report) = cleaner.finish()?;
    if report.rows_read == 0 {
        return Err(crate::error::Error::EmptyInput {
            path: path.display().to_string(),
        });
    }
    Ok((dataset, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::DatasetSummary;

    fn fixture(name: &str) -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name)
    }

    #[test]
    fn curated_ten_rows() {
        let (ds, report) = parse_uci(&fixture("uci_10rows.csv")).unwrap();
        assert_eq!(report.rows_read, 10);
        assert_eq!(report.rows_kept, 6);
        assert_eq!(report.dropped_cancelled, 1);
        assert_eq!(report.dropped_missing_user, 1);
        assert_eq!(report.dropped_non_positive_quantity, 2);
        assert_eq!(report.dropped_non_positive_price, 0);
        assert_eq!(report.rows_read, report.rows_kept + report.dropped_total());
        assert_eq!(
            report.summary,
            DatasetSummary {
                users: 3,
                transactions: 5,
                units: 188,
                products: 6,
                span_days: 0,
            }
        );
        assert_eq!(ds.items().len(), 6);
    }

    #[test]
    fn cancelled_only_file_is_all_dropped() {
        let (ds, report) = parse_uci(&fixture("uci_cancelled_only.csv")).unwrap();
        assert!(ds.is_empty());
        assert_eq!(report.rows_kept, 0);
        assert_eq!(report.rows_read, report.dropped_cancelled);
        assert_eq!(report.summary, DatasetSummary::default());
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no_invoice.csv");
        std::fs::write(&path, "StockCode,Quantity,InvoiceDate,Price,Customer ID\n").unwrap();
        match parse_uci(&path).unwrap_err() {
            crate::error::Error::MissingColumn { name, .. } => assert_eq!(name, "Invoice"),
            other => panic!("unexpected error: {other}"),
        }
    }
}
