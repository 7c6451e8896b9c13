//! Output files: CSV tables and JSON documents, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Shortest round-trip representation; scientific notation outside
/// [10⁻⁴, 10¹⁵) so that tiny values stay short.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column-oriented table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Table {
            headers: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.headers.push(name.to_string());
        self.columns.push(values);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self) -> CliResult<String> {
        if self.columns.iter().any(|c| c.len() != self.rows()) {
            return Err(CliError::Numerical("table columns differ in length".into()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Numerical(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(fail)?;
        for i in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| num(c[i]))).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Numerical(e.to_string()))
    }

    /// `{"header": [values...], ...}` with keys in column order.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (h, c) in self.headers.iter().zip(&self.columns) {
            m.insert(h.clone(), serde_json::json!(c));
        }
        serde_json::Value::Object(m)
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}

pub fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(dir: &Path, file_name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create output directory {}: {e}", dir.display())))?;
    let target = dir.join(file_name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::config(format!("cannot write in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target)
        .map_err(|e| CliError::config(format!("cannot write {}: {}", target.display(), e.error)))?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(60.0), "60");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(-2e20), "-2e20");
    }

    #[test]
    fn csv_layout() {
        let t = Table::new().column("t_us", vec![0.0, 1.5]).column("eta", vec![1.0, 0.5]);
        assert_eq!(t.to_csv().unwrap(), "t_us,eta\n0,1\n1.5,0.5\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let d = tempfile::tempdir().unwrap();
        write_atomic(d.path(), "a.txt", "one").unwrap();
        let p = write_atomic(d.path(), "a.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 1);
    }
}
