//! CSV, column-file and JSON writers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{DiagnosticsRow, StabilityRow};
use crate::error::Result;

/// Decimal with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn write_table<'a, I>(path: &Path, header: &str, sep: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        writeln!(w, "{}", line.join(sep))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow], stride: usize) -> Result<()> {
    let values: Vec<[f64; 24]> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i + 1 == rows.len())
        .map(|(_, r)| r.values())
        .collect();
    write_table(
        path,
        &DiagnosticsRow::COLUMNS.join(","),
        ",",
        values.iter().map(|r| &r[..]),
    )
}

pub fn write_stability_csv(path: &Path, rows: &[StabilityRow]) -> Result<()> {
    let values: Vec<[f64; 6]> = rows.iter().map(|r| r.values()).collect();
    write_table(
        path,
        &StabilityRow::COLUMNS.join(","),
        ",",
        values.iter().map(|r| &r[..]),
    )
}

/// Generic CSV with the given column names.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_table(path, &columns.join(","), ",", rows.iter().map(|r| &r[..]))
}

/// Whitespace-separated columns with a `#` header, for plotting tools.
pub fn write_columns(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_table(
        path,
        &format!("# {}", columns.join(" ")),
        " ",
        rows.iter().map(|r| &r[..]),
    )
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
