use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use robustchoice_core::choice::Assortment;
use robustchoice_core::models::TransactionCounts;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Assortment files are JSON lists of product lists; `0` may be omitted.
pub fn read_assortments(path: &Path, n: usize) -> Result<Vec<Assortment>> {
    let lists: Vec<Vec<usize>> = read_json(path)?;
    lists
        .into_iter()
        .map(|l| Assortment::checked(n, l).map_err(Into::into))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    #[serde(rename = "assortment-id")]
    assortment: usize,
    #[serde(rename = "product-id")]
    product: usize,
    count: u64,
}

/// Reads a transactions CSV with header `assortment-id,product-id,count`.
///
/// Every product listed under an assortment id is taken to be offered there
/// (zero counts included); `0` is always offered. Assortments are numbered in
/// increasing id order. `n` defaults to one more than the largest product id.
pub fn read_transactions(path: &Path, n: Option<usize>) -> Result<TransactionCounts> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut by_id: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for rec in reader.deserialize() {
        let rec: Record = rec.with_context(|| format!("parsing {}", path.display()))?;
        by_id.entry(rec.assortment).or_default().push((rec.product, rec.count));
    }
    if by_id.is_empty() {
        bail!("{} holds no transactions", path.display());
    }
    let largest = by_id.values().flatten().map(|&(p, _)| p).max().unwrap_or(0);
    let n = n.unwrap_or(largest + 1);
    let mut assortments = Vec::with_capacity(by_id.len());
    let mut records = Vec::new();
    for (m, rows) in by_id.values().enumerate() {
        assortments.push(Assortment::checked(n, rows.iter().map(|&(p, _)| p))?);
        records.extend(rows.iter().map(|&(p, c)| (m, p, c)));
    }
    Ok(TransactionCounts::from_records(n, assortments, &records)?)
}

pub fn transactions_csv(counts: &TransactionCounts) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (m, product, count) in counts.records() {
        w.serialize(Record {
            assortment: m,
            product,
            count,
        })?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transactions_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tx.csv");
        let counts = TransactionCounts::new(
            4,
            vec![Assortment::new([1, 3]), Assortment::new([2])],
            vec![vec![5, 0, 7], vec![9, 1]],
        )
        .unwrap();
        fs::write(&path, transactions_csv(&counts).unwrap()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("assortment-id,product-id,count\n0,0,5\n"));
        let back = read_transactions(&path, Some(4)).unwrap();
        assert_eq!(back, counts);
        assert_eq!(read_transactions(&path, None).unwrap().n, 4);
    }
}
