//! Table assembly and deterministic formatting.
//!
//! Every command emits one schema-stable table (fixed column order). All
//! numeric output is rounded to 9 significant digits, in CSV cells and in
//! JSON values alike, so reruns with the same configuration are
//! byte-identical.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

/// Round to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 8 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

/// Deterministic decimal rendering of a 9-significant-digit value.
pub fn fmt9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let r = round9(x);
    if r != 0.0 && (r.abs() >= 1e15 || r.abs() < 1e-5) {
        format!("{r:.8e}")
    } else {
        format!("{r}")
    }
}

/// A rectangular table with a fixed header.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt9(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn rounded_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&v| round9(v)).collect())
            .collect()
    }
}

/// JSON wrapper for a plain table, with optional spectrum reports for the
/// matrix commands.
#[derive(Serialize)]
pub struct TableJson<C: Serialize> {
    pub command: &'static str,
    pub config: C,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra: Option<Vec<fevt::matrixlab::SpectrumReport>>,
}
