//! CSV ingestion and component output.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use strucdecomp::model::validate_series;
use strucdecomp::{DecompositionResult, TimeSeries};

use crate::CliError;

pub const COLUMNS: [&str; 9] = [
    "index", "time", "value", "cleaned", "trend", "seasonal", "residual", "segment", "anomaly",
];

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

fn parse_cell(cell: &str) -> Option<Option<f64>> {
    if is_missing(cell) {
        Some(None)
    } else {
        cell.parse::<f64>().ok().map(Some)
    }
}

/// Values (`None` where missing) and optional time labels.
pub type RawColumns = (Vec<Option<f64>>, Option<Vec<String>>);

/// Raw cells of a one- or two-column CSV.
pub fn read_raw(path: &Path) -> Result<RawColumns, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let w = *width.get_or_insert(record.len());
        if w != 1 && w != 2 {
            return Err(CliError::Input(format!(
                "{}: expected 1 or 2 columns, found {w}",
                path.display()
            )));
        }
        let cell = &record[w - 1];
        match parse_cell(cell) {
            Some(v) => {
                values.push(v);
                if w == 2 {
                    labels.push(record[0].to_string());
                }
            }
            // A non-numeric first row is a header.
            None if row == 0 => {}
            None => {
                return Err(CliError::Input(format!(
                    "{}: row {}: cannot parse `{cell}` as a number",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    let labels = (width == Some(2)).then_some(labels);
    Ok((values, labels))
}

pub fn read_series(path: &Path, impute: bool) -> Result<TimeSeries, CliError> {
    let (values, labels) = read_raw(path)?;
    Ok(validate_series(&values, labels, impute)?)
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v}")
}

pub fn write_components<W: Write>(out: W, series: &TimeSeries, r: &DecompositionResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    let segments = r.changepoints.segment_ids();
    for i in 0..r.len() {
        let time = match series.time_labels() {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        };
        w.write_record([
            i.to_string(),
            time,
            fmt_num(r.observed[i]),
            fmt_num(r.cleaned[i]),
            fmt_num(r.trend[i]),
            fmt_num(r.seasonal[i]),
            fmt_num(r.residual[i]),
            segments[i].to_string(),
            u8::from(r.anomalies.flags[i]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
