//! Matrix import/export: plain-text edge lists (`i j weight`, 1-based) and
//! dense CSV. Weights are printed with 17 significant digits so round trips
//! are exact.

use super::NetError;
use nalgebra::DMatrix;
use std::io::{BufRead, Write};

/// Write nonzero entries as `i j weight` lines with 1-based indices.
pub fn write_edge_list<W: Write>(out: &mut W, m: &DMatrix<f64>) -> Result<(), NetError> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let w = m[(i, j)];
            if w != 0.0 {
                writeln!(out, "{} {} {:.16e}", i + 1, j + 1, w)?;
            }
        }
    }
    Ok(())
}

/// Read an `i j weight` edge list (1-based indices, `#` comments allowed).
/// The dimension is the largest node label seen.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<DMatrix<f64>, NetError> {
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut d = 0usize;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse = |tok: Option<&str>, what: &str| -> Result<String, NetError> {
            tok.map(str::to_owned).ok_or_else(|| NetError::Parse {
                line: lineno + 1,
                msg: format!("missing {what}"),
            })
        };
        let mut parts = trimmed.split_whitespace();
        let i: usize = parse(parts.next(), "source index")?
            .parse()
            .map_err(|e| NetError::Parse { line: lineno + 1, msg: format!("{e}") })?;
        let j: usize = parse(parts.next(), "target index")?
            .parse()
            .map_err(|e| NetError::Parse { line: lineno + 1, msg: format!("{e}") })?;
        let w: f64 = parse(parts.next(), "weight")?
            .parse()
            .map_err(|e| NetError::Parse { line: lineno + 1, msg: format!("{e}") })?;
        if i == 0 || j == 0 {
            return Err(NetError::Parse { line: lineno + 1, msg: "indices are 1-based".into() });
        }
        d = d.max(i).max(j);
        entries.push((i - 1, j - 1, w));
    }
    if d == 0 {
        return Err(NetError::EmptyDimension);
    }
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (i, j, w) in entries {
        m[(i, j)] = w;
    }
    Ok(m)
}

/// Write a dense matrix as CSV, one row per line.
pub fn write_dense_csv<W: Write>(out: &mut W, m: &DMatrix<f64>) -> Result<(), NetError> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Read a dense square CSV matrix.
pub fn read_dense_csv<R: BufRead>(input: R) -> Result<DMatrix<f64>, NetError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = trimmed.split(',').map(|t| t.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| NetError::Parse { line: lineno + 1, msg: format!("{e}") })?);
    }
    let d = rows.len();
    if d == 0 {
        return Err(NetError::EmptyDimension);
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(NetError::Parse {
                line: i + 1,
                msg: format!("expected {d} columns, got {}", row.len()),
            });
        }
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}
