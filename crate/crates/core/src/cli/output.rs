//! Tables and where they go.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    /// Real numbers use 17 significant digits so the text round-trips.
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(io::Error::other(e));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("rendered cells are UTF-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({ "name": self.name, "columns": self.columns, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

/// Collects tables and summary lines for one command.
///
/// With an output directory, each table becomes `<name>.csv` (or `.json`)
/// and the summary goes to stdout. Without one, tables go to stdout and the
/// summary to stderr so the data can be piped.
#[derive(Debug)]
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
    summary: Vec<String>,
    written: Vec<PathBuf>,
    stdout_tables: usize,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Self {
        Self {
            dir,
            format,
            summary: Vec::new(),
            written: Vec::new(),
            stdout_tables: 0,
        }
    }

    pub fn emit(&mut self, table: &Table) -> Result<()> {
        let (text, ext) = match self.format {
            Format::Csv => (table.to_csv()?, "csv"),
            Format::Json => (table.to_json()?, "json"),
        };
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{}.{ext}", table.name));
                fs::write(&path, text)?;
                self.written.push(path);
            }
            None => {
                let mut out = io::stdout().lock();
                if self.stdout_tables > 0 {
                    writeln!(out)?;
                }
                if self.format == Format::Csv {
                    writeln!(out, "# {}", table.name)?;
                }
                out.write_all(text.as_bytes())?;
                self.stdout_tables += 1;
            }
        }
        Ok(())
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn summary(&self) -> &[String] {
        &self.summary
    }

    pub fn finish(&self) -> Result<()> {
        let lines = self.summary.iter().cloned().chain(
            self.written
                .iter()
                .map(|p| format!("wrote {}", p.display())),
        );
        if self.dir.is_some() {
            let mut out = io::stdout().lock();
            for l in lines {
                writeln!(out, "{l}")?;
            }
        } else {
            let mut err = io::stderr().lock();
            for l in lines {
                writeln!(err, "{l}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_seventeen_significant_digits() {
        let mut t = Table::new("t", &["x", "n", "tag"]);
        t.push(vec![0.1.into(), 3usize.into(), "ok".into()]);
        let text = t.to_csv().unwrap();
        assert_eq!(text, "x,n,tag\n1.0000000000000001e-1,3,ok\n");
        let back: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new("t", &["b", "a"]);
        t.push(vec![1.5.into(), f64::INFINITY.into()]);
        let v: Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v["columns"], json!(["b", "a"]));
        assert_eq!(v["rows"][0], json!([1.5, "inf"]));
    }
}
