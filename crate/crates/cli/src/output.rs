use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::Usage(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Display prints the shortest decimal that round-trips exactly.
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows with a fixed column order. A single-record table renders as one
/// JSON object instead of an array.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub single: bool,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), single: false }
    }

    pub fn to_json(&self) -> Value {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(m)
            })
            .collect();
        if self.single && objects.len() == 1 {
            objects.into_iter().next().unwrap()
        } else {
            Value::Array(objects)
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io_err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(io_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&self.to_json()).expect("serializable"))),
        }
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let result = match out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| match out {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    })
}
