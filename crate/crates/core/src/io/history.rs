//! Return history as comma-separated text.
//!
//! The header row is mandatory: the first column holds period labels, the
//! rest name the assets. Cells are dot-decimal simple returns (`0.0838`).

use std::path::Path;

use super::IoError;
use crate::estimation::ReturnHistory;

pub fn parse_history(path: impl AsRef<Path>) -> Result<ReturnHistory, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_history_str(&text)
}

pub fn parse_history_str(text: &str) -> Result<ReturnHistory, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| csv_error(&e))?.clone();
    if header.len() < 2 {
        return Err(IoError::Parse {
            line: 1,
            column: header.len().max(1),
            message: "header needs a period column and at least one asset".into(),
        });
    }
    let assets: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if let Some(pos) = assets.iter().position(String::is_empty) {
        return Err(IoError::Parse {
            line: 1,
            column: pos + 2,
            message: "empty asset name".into(),
        });
    }

    let mut periods = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != header.len() {
            return Err(IoError::Parse {
                line,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        periods.push(record[0].to_string());
        let row = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, cell)| parse_cell(cell, line, c + 1))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IoError::Parse {
            line: 2,
            column: 1,
            message: "no data rows".into(),
        });
    }
    ReturnHistory::new(periods, assets, rows).map_err(IoError::Estimation)
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64, IoError> {
    let value: f64 = cell.parse().map_err(|_| IoError::Parse {
        line,
        column,
        message: format!("{cell:?} is not a decimal number"),
    })?;
    if !value.is_finite() {
        return Err(IoError::NonFiniteValue { line, column });
    }
    Ok(value)
}

fn csv_error(e: &csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    IoError::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Render a history in the same format `parse_history_str` reads.
pub fn write_history(history: &ReturnHistory) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["period".to_string()];
    header.extend(history.assets().iter().cloned());
    writer.write_record(&header).expect("in-memory write");
    for (label, row) in history.periods().iter().zip(history.rows()) {
        let mut record = vec![label.clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
