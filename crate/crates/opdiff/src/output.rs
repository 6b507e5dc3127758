//! File writers. Floats use Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use opdiff_core::flow::FieldSample;
use opdiff_core::Complex64;
use serde::Serialize;

use crate::error::{AppError, AppResult};

/// One row of a diagnostics CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diag {
    pub n: usize,
    pub quantity: String,
    pub value: f64,
    pub target: f64,
    pub abs_error: f64,
}

impl Diag {
    pub fn new(n: usize, quantity: impl Into<String>, value: f64, target: f64) -> Self {
        Diag { n, quantity: quantity.into(), value, target, abs_error: (value - target).abs() }
    }
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|&z| pair(z)).collect()
}

/// Shortest round-trip text; exponent form for very small or large magnitudes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Write { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> AppError + '_ {
    move |e| AppError::Write { path: path.to_path_buf(), source: std::io::Error::other(e) }
}

pub fn ensure_dir(dir: &Path) -> AppResult<()> {
    std::fs::create_dir_all(dir).map_err(write_err(dir))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<PathBuf> {
    let file = File::create(path).map_err(write_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| write_err(path)(std::io::Error::other(e)))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(write_err(path))?;
    Ok(path.to_path_buf())
}

/// Writes `header` followed by `rows`; `None` cells are left empty.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> AppResult<PathBuf> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map_or_else(String::new, num)).collect();
        w.write_record(&cells).map_err(csv_err(path))?;
    }
    w.flush().map_err(write_err(path))?;
    Ok(path.to_path_buf())
}

pub fn write_diagnostics(path: &Path, rows: &[Diag]) -> AppResult<PathBuf> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["n", "quantity", "value", "target", "abs_error"]).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([r.n.to_string(), r.quantity.clone(), num(r.value), num(r.target), num(r.abs_error)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(write_err(path))?;
    Ok(path.to_path_buf())
}

/// `re,im,class` rows.
pub fn write_zeros(path: &Path, zeros: &[Complex64], classes: &[&str]) -> AppResult<PathBuf> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["re", "im", "class"]).map_err(csv_err(path))?;
    for (z, c) in zeros.iter().zip(classes) {
        w.write_record([num(z.re), num(z.im), (*c).to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(write_err(path))?;
    Ok(path.to_path_buf())
}

/// `re,im,v_re,v_im,v_abs`; samples without a value get empty velocity cells.
pub fn write_field(path: &Path, samples: &[FieldSample]) -> AppResult<PathBuf> {
    write_table(
        path,
        &["re", "im", "v_re", "v_im", "v_abs"],
        samples.iter().map(|s| {
            vec![Some(s.z.re), Some(s.z.im), s.v.map(|v| v.re), s.v.map(|v| v.im), s.v.map(|v| v.norm())]
        }),
    )
}
