use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::args::Format;

/// Bumped whenever columns or the JSON layout change.
pub const ARTIFACT_VERSION: u32 = 1;
pub const TOOL: &str = "macrolab";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format_float(*x)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

/// Shortest representation that parses back to the same value.
fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a command produced: a table, and for structured reports the full
/// JSON document as well (used instead of the table rows in JSON output).
#[derive(Debug, Clone)]
pub struct Artifact {
    pub table: Table,
    pub document: Option<Value>,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
}

pub struct Header<'a> {
    pub command: &'a str,
    pub config: &'a Value,
}

pub fn render(artifact: &Artifact, header: &Header, format: Format) -> String {
    match format {
        Format::Csv => render_csv(&artifact.table, header),
        Format::Json => render_json(artifact, header),
    }
}

fn render_csv(table: &Table, header: &Header) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# tool: {TOOL} {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# artifact_version: {ARTIFACT_VERSION}");
    let _ = writeln!(out, "# command: {}", header.command);
    let _ = writeln!(out, "# config: {}", header.config);
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn render_json(artifact: &Artifact, header: &Header) -> String {
    let results = artifact.document.clone().unwrap_or_else(|| {
        let t = &artifact.table;
        Value::Array(
            t.rows
                .iter()
                .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                .collect(),
        )
    });
    let doc = json!({
        "config": header.config,
        "results": results,
        "meta": {
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "artifact_version": ARTIFACT_VERSION,
            "command": header.command,
            "columns": artifact.table.columns,
            "rows": artifact.table.rows.len(),
        },
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}
