//! Deterministic table emission. CSV carries metadata as leading
//! `# key = value` comment lines followed by a mandatory header row; JSON
//! carries the same keys in a `metadata` object next to a `rows` array of
//! objects with the column names as fields. Identical inputs render to
//! identical bytes: every float goes through a shortest round-trip
//! formatter and key order is fixed by construction.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::CliError;

/// Bumped whenever a column set or a metadata key changes meaning.
pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!(
                "format must be csv or json, got {other:?}"
            ))),
        }
    }
}

/// One table cell; Empty renders as a blank CSV field and JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => {
                // column values never need quoting; keep the writer trivial
                debug_assert!(!s.contains([',', '"', '\n']));
                s.clone()
            }
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => float_value(*v),
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MetaValue {
    Float(f64),
    Int(i64),
    Text(String),
}

/// Shortest decimal string that parses back to exactly `v`: plain notation
/// in a comfortable range, exponent notation outside it.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let magnitude = v.abs();
    if (1e-4..1e16).contains(&magnitude) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn float_value(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// An ordered result table: metadata key/value pairs, a fixed column set,
/// and data rows. Rendering is a pure function of the contents.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    metadata: Vec<(String, MetaValue)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        let mut table =
            Table { columns: columns.to_vec(), metadata: Vec::new(), rows: Vec::new() };
        table.meta_int("schema_version", SCHEMA_VERSION);
        table.meta_text("command", command);
        table
    }

    pub fn meta_float(&mut self, key: &str, value: f64) {
        self.metadata.push((key.to_string(), MetaValue::Float(value)));
    }

    pub fn meta_int(&mut self, key: &str, value: i64) {
        self.metadata.push((key.to_string(), MetaValue::Int(value)));
    }

    pub fn meta_text(&mut self, key: &str, value: &str) {
        self.metadata.push((key.to_string(), MetaValue::Text(value.to_string())));
    }

    /// Comma list of floats, the same spelling the config file uses.
    pub fn meta_floats(&mut self, key: &str, values: &[f64]) {
        let list: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
        self.meta_text(key, &list.join(","));
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "row width matches the header");
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let text = match value {
                MetaValue::Float(v) => fmt_float(*v),
                MetaValue::Int(v) => v.to_string(),
                MetaValue::Text(s) => s.clone(),
            };
            let _ = writeln!(out, "# {key} = {text}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        let mut metadata = Map::new();
        for (key, value) in &self.metadata {
            let json = match value {
                MetaValue::Float(v) => float_value(*v),
                MetaValue::Int(v) => Value::Number((*v).into()),
                MetaValue::Text(s) => Value::String(s.clone()),
            };
            metadata.insert(key.clone(), json);
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut object = Map::new();
                for (column, cell) in self.columns.iter().zip(row) {
                    object.insert((*column).to_string(), cell.json());
                }
                Value::Object(object)
            })
            .collect();
        let mut root = Map::new();
        root.insert("metadata".to_string(), Value::Object(metadata));
        root.insert("rows".to_string(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("tables hold only serializable values");
        text.push('\n');
        text
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format);
        match out {
            Some(path) => fs::write(path, text).map_err(|e| {
                CliError::Io(format!("cannot write {}: {e}", path.display()))
            }),
            None => io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
        }
    }
}
