//! File formats: CSV matrices with row/column ids, JSON with 17 significant
//! digits, and output-directory helpers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::pipeline::SpecializationMatrix;

/// Float formatting used in every CSV and JSON file: 17 significant digits,
/// enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn sig17(v: &[f64]) -> Vec<Sig17> {
    v.iter().copied().map(Sig17).collect()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Validation(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

fn matrix_csv(row_ids: &[String], col_ids: &[String], cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = String::from("id");
    for c in col_ids {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, r) in row_ids.iter().enumerate() {
        out.push_str(r);
        for j in 0..col_ids.len() {
            out.push(',');
            out.push_str(&cell(i, j));
        }
        out.push('\n');
    }
    out
}

/// Header row `id,<col ids>`, then one row per matrix row led by its id.
pub fn f64_matrix_csv(m: &DMatrix<f64>, row_ids: &[String], col_ids: &[String]) -> String {
    matrix_csv(row_ids, col_ids, |i, j| fmt_f64(m[(i, j)]))
}

pub fn u8_matrix_csv(m: &DMatrix<u8>, row_ids: &[String], col_ids: &[String]) -> String {
    matrix_csv(row_ids, col_ids, |i, j| m[(i, j)].to_string())
}

/// Column-oriented table; every column must have the same length.
pub fn table_csv(headers: &[&str], columns: &[Vec<String>]) -> String {
    let mut out = headers.join(",");
    out.push('\n');
    let n = columns.first().map_or(0, |c| c.len());
    for i in 0..n {
        let row: Vec<&str> = columns.iter().map(|c| c[i].as_str()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A parsed matrix CSV in the layout written by [`f64_matrix_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCsv {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub values: DMatrix<f64>,
}

pub fn parse_matrix_csv(text: &str, origin: &Path) -> Result<MatrixCsv> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if headers.len() < 2 {
        return Err(parse_err("need an id column and at least one value column".into()));
    }
    let col_ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(parse_err(format!("row {} has {} fields, expected {}", line + 1, rec.len(), headers.len())));
        }
        row_ids.push(rec[0].to_string());
        for field in rec.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("row {}: `{field}` is not a number", line + 1)))?;
            data.push(v);
        }
    }
    if row_ids.is_empty() {
        return Err(parse_err("no data rows".into()));
    }
    Ok(MatrixCsv {
        values: DMatrix::from_row_slice(row_ids.len(), col_ids.len(), &data),
        row_ids,
        col_ids,
    })
}

pub fn read_matrix_csv(path: &Path) -> Result<MatrixCsv> {
    parse_matrix_csv(&read_text(path)?, path)
}

/// Read a 0/1 specialisation matrix.
pub fn read_specialization_csv(path: &Path) -> Result<SpecializationMatrix> {
    let m = read_matrix_csv(path)?;
    if let Some(v) = m.values.iter().find(|v| **v != 0.0 && **v != 1.0) {
        return Err(Error::Validation(format!("{}: entry {v} is not 0 or 1", path.display())));
    }
    SpecializationMatrix::new(m.values.map(|v| v as u8), m.row_ids, m.col_ids)
}

/// Collects the files written by a command, in write order.
#[derive(Debug, Default)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        ensure_dir(&root)?;
        Ok(OutDir {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        write_text(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.root.join(name);
        write_json(&path, value)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn with_writer(&mut self, name: &str, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<PathBuf> {
        let path = self.root.join(name);
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
