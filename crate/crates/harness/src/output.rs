use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One iteration of one method in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub rep: usize,
    pub iter: usize,
    pub fval: f64,
    /// f − f̂*, clipped at 0.
    pub gap: f64,
    /// ‖∇f‖ or ‖∂⁻f‖.
    pub residual: f64,
    pub restart: u8,
}

pub const CSV_HEADER: &str = "method,rep,iter,fval,gap,residual,restart";

pub fn write_csv_to<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    write_csv_to(rows, BufWriter::new(File::create(path)?))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_report<T: Serialize + ?Sized>(report: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(iter: usize, fval: f64) -> ResultRow {
        ResultRow { method: "rcm-grad".into(), rep: 2, iter, fval, gap: fval + 0.5, residual: 1e-17 * fval, restart: (iter % 2) as u8 }
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let rows: Vec<_> = (0..50).map(|k| row(k, 0.1 * k as f64 - 1.0 / 3.0)).collect();
        write_csv(&rows, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
    }
}
