//! Plain-text matrix format: a header line `n m`, then n rows of m
//! whitespace-separated reals. Vectors are written as n×1 matrices.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn write_matrix<W: Write>(mut out: W, a: &DMatrix<f64>) -> Result<()> {
    writeln!(out, "{} {}", a.nrows(), a.ncols())?;
    for row in a.row_iter() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_vector<W: Write>(out: W, v: &DVector<f64>) -> Result<()> {
    write_matrix(out, &DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

pub fn read_matrix<R: BufRead>(input: R) -> Result<DMatrix<f64>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))??;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad header {header:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [n, m] = dims[..] else {
        return Err(Error::Parse(format!("header must be `n m`, got {header:?}")));
    };
    let mut data = Vec::with_capacity(n * m);
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(tok.parse::<f64>().map_err(|e| Error::Parse(format!("row {row}: {e}")))?);
        }
        if data.len() - before != m {
            return Err(Error::Parse(format!("row {row} has {} entries, expected {m}", data.len() - before)));
        }
    }
    if data.len() != n * m {
        return Err(Error::Parse(format!("expected {n} rows, found {}", data.len() / m.max(1))));
    }
    Ok(DMatrix::from_row_slice(n, m, &data))
}

pub fn read_vector<R: BufRead>(input: R) -> Result<DVector<f64>> {
    let a = read_matrix(input)?;
    if a.ncols() != 1 {
        return Err(Error::Parse(format!("expected a column vector, got {} columns", a.ncols())));
    }
    Ok(a.column(0).into_owned())
}
