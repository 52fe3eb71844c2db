use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use cubecycle::io::{fmt_f64, write_json, write_sidecar, CsvTable};

use crate::config::Format;
use crate::CliError;

pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Value::from(if *x == 0.0 { 0.0 } else { *x }),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

/// Writes tables and documents under the output directory, each with a
/// sidecar echoing `echo`.
pub struct Output {
    dir: PathBuf,
    format: Format,
    echo: Value,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, format: Format, echo: Value) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(cubecycle::Error::from)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            format,
            echo,
            written: Vec::new(),
        })
    }

    fn finish(&mut self, path: PathBuf) -> Result<(), CliError> {
        write_sidecar(&path, &self.echo)?;
        self.written.push(path);
        Ok(())
    }

    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{stem}.csv"));
                let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
                let mut t = CsvTable::new(
                    BufWriter::new(File::create(&path).map_err(cubecycle::Error::from)?),
                    &header,
                )?;
                for r in &table.rows {
                    t.row(r.iter().map(Cell::csv))?;
                }
                t.finish()?;
                self.finish(path)
            }
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            table.header.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let path = self.dir.join(format!("{stem}.json"));
                write_json(&path, &rows)?;
                self.finish(path)
            }
        }
    }

    pub fn document<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(format!("{stem}.json"));
        write_json(&path, value)?;
        self.finish(path)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(cubecycle::Error::from)?;
        self.finish(path)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
