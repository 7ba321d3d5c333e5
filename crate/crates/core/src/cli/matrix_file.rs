//! Plain-text matrices: one row per line, whitespace-separated numbers,
//! `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::CliError;
use crate::linalg::Matrix;

pub fn parse_matrix(text: &str, source: &str) -> Result<Matrix<f64>, CliError> {
    let parse_err = |line: usize, message: String| CliError::Parse { origin: source.to_string(), line, message };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(parse_err(idx + 1, format!("non-finite entry {tok:?}"))),
                Err(_) => Err(parse_err(idx + 1, format!("not a number: {tok:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(idx + 1, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no matrix rows".into()));
    }
    Ok(Matrix::from_rows(&rows)?)
}

pub fn read_matrix(path: &Path) -> Result<Matrix<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    parse_matrix(&text, &path.display().to_string())
}

/// Round-trippable text form (shortest representation of each entry).
pub fn format_matrix(m: &Matrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
