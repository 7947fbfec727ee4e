//! Plain-text matrix files: one matrix row per line, comma-separated decimal
//! floats, no header. Writers emit 17 significant digits so a write/read cycle
//! reproduces every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SensingMatrix;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn parse_matrix(text: &str) -> Result<SensingMatrix> {
    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let line_no = lineno + 1;
        let mut count = 0;
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite value {field:?}"),
                });
            }
            data.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {c} columns, found {count}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or(Error::Parse {
        line: 0,
        msg: "no matrix rows found".into(),
    })?;
    SensingMatrix::from_row_major(rows, cols, data)
}

pub fn format_matrix(psi: &SensingMatrix) -> String {
    let mut out = String::with_capacity(psi.n_rows() * psi.n_cols() * 24);
    for row in psi.rows() {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(*x));
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SensingMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, psi: &SensingMatrix) -> Result<()> {
    fs::write(path, format_matrix(psi))?;
    Ok(())
}
