//! Plain-text matrix and report files.
//!
//! Matrices are stored as comma-separated rows of reals with no header.
//! Label vectors are stored one non-negative integer per line.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Result, SsnmfError};
use crate::matrix::DenseMatrix;

pub fn parse_matrix(text: &str, source_name: &str) -> Result<DenseMatrix> {
    let parse_err = |line: usize, message: String| SsnmfError::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(i + 1, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(i + 1, format!("non-finite value {field:?}")));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    i + 1,
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no rows".into()));
    }
    DenseMatrix::from_rows(&rows)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 8);
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| SsnmfError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| SsnmfError::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = read_text(path)?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_text(path, &format_matrix(m))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v = line.parse().map_err(|_| SsnmfError::Parse {
            source_name: path.display().to_string(),
            line: i + 1,
            message: format!("not a class index: {line:?}"),
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    write_text(path, &format_labels(labels))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = DenseMatrix::from_rows(&[vec![0.1, 1.0 / 3.0, 2.0], vec![1e-300, 123456.789, 0.0]])
            .unwrap();
        let back = parse_matrix(&format_matrix(&m), "mem").unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ragged_rows_are_rejected_with_line() {
        let err = parse_matrix("1,2\n3\n", "x.csv").unwrap_err();
        match err {
            SsnmfError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn garbage_and_empty_are_rejected() {
        assert!(parse_matrix("1,a\n", "x").is_err());
        assert!(parse_matrix("\n\n", "x").is_err());
        assert!(parse_matrix("1,inf\n", "x").is_err());
    }

    #[test]
    fn blank_lines_and_spaces_are_tolerated() {
        let m = parse_matrix("1, 2\n\n 3,4 \n", "x").unwrap();
        assert_eq!(m.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }
}
