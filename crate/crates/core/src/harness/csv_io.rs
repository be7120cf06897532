//! CSV files for raw estimates, per-`N` summaries and slope fits.
//!
//! Floats are written as `{:.16e}` so that reading a file back reproduces
//! every value bit for bit.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use super::{Record, SlopeFit, SummaryRow, VarianceSummary};
use crate::error::{Error, Result};
use crate::samplers::Method;

pub const RECORD_HEADER: [&str; 6] = ["method", "integrand", "N", "rep", "seed", "estimate"];
pub const SUMMARY_HEADER: [&str; 7] = [
    "method",
    "integrand",
    "N",
    "reps",
    "mean",
    "variance",
    "std_error",
];
pub const SLOPE_HEADER: [&str; 5] = ["method", "integrand", "slope", "intercept", "r_squared"];

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn to_path(
    path: &Path,
    body: impl FnOnce(&mut csv::Writer<File>) -> csv::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = writer(file);
    body(&mut w).map_err(|e| Error::csv(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn records_body<W: Write>(w: &mut csv::Writer<W>, records: &[Record]) -> csv::Result<()> {
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.method.tag().to_string(),
            r.integrand.clone(),
            r.n.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            float(r.estimate),
        ])?;
    }
    Ok(())
}

pub fn write_records_to<W: Write>(out: W, records: &[Record]) -> io::Result<()> {
    let mut w = writer(out);
    records_body(&mut w, records).map_err(io::Error::other)?;
    w.flush()
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    to_path(path, |w| records_body(w, records))
}

pub fn write_summary(path: &Path, summary: &VarianceSummary) -> Result<()> {
    to_path(path, |w| {
        w.write_record(SUMMARY_HEADER)?;
        for r in &summary.rows {
            w.write_record([
                r.method.tag().to_string(),
                r.integrand.clone(),
                r.n.to_string(),
                r.reps.to_string(),
                float(r.mean),
                float(r.variance),
                float(r.std_error),
            ])?;
        }
        Ok(())
    })
}

pub fn write_slopes(path: &Path, fits: &[SlopeFit]) -> Result<()> {
    to_path(path, |w| {
        w.write_record(SLOPE_HEADER)?;
        for f in fits {
            w.write_record([
                f.method.tag().to_string(),
                f.integrand.clone(),
                float(f.slope),
                float(f.intercept),
                float(f.r_squared),
            ])?;
        }
        Ok(())
    })
}

/// Reads `path`, checks the header and hands every row to `parse_row`.
fn read_rows<T>(
    path: &Path,
    header: &[&str],
    parse_row: impl Fn(&csv::StringRecord) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::InvalidArgument(format!(
            "{}: expected header {}, found {}",
            path.display(),
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        let parsed = parse_row(&row).map_err(|m| {
            Error::InvalidArgument(format!("{}: data row {}: {m}", path.display(), line + 1))
        })?;
        out.push(parsed);
    }
    Ok(out)
}

fn field<T: FromStr>(
    row: &csv::StringRecord,
    i: usize,
    name: &str,
) -> std::result::Result<T, String> {
    let raw = row.get(i).ok_or_else(|| format!("missing column {name}"))?;
    raw.parse().map_err(|_| format!("bad {name} value {raw:?}"))
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    read_rows(path, &RECORD_HEADER, |row| {
        Ok(Record {
            method: field(row, 0, "method")?,
            integrand: field(row, 1, "integrand")?,
            n: field(row, 2, "N")?,
            rep: field(row, 3, "rep")?,
            seed: field(row, 4, "seed")?,
            estimate: field(row, 5, "estimate")?,
        })
    })
}

pub fn read_summary(path: &Path) -> Result<VarianceSummary> {
    let rows = read_rows(path, &SUMMARY_HEADER, |row| {
        Ok(SummaryRow {
            method: field::<Method>(row, 0, "method")?,
            integrand: field(row, 1, "integrand")?,
            n: field(row, 2, "N")?,
            reps: field(row, 3, "reps")?,
            mean: field(row, 4, "mean")?,
            variance: field(row, 5, "variance")?,
            std_error: field(row, 6, "std_error")?,
        })
    })?;
    Ok(VarianceSummary { rows })
}

pub fn read_slopes(path: &Path) -> Result<Vec<SlopeFit>> {
    read_rows(path, &SLOPE_HEADER, |row| {
        Ok(SlopeFit {
            method: field(row, 0, "method")?,
            integrand: field(row, 1, "integrand")?,
            slope: field(row, 2, "slope")?,
            intercept: field(row, 3, "intercept")?,
            r_squared: field(row, 4, "r_squared")?,
        })
    })
}
