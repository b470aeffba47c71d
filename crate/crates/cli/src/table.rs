//! Result tables and their CSV / JSON rendering.

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Bool(bool),
    Text(&'static str),
}

impl Cell {
    /// Shortest round-trip decimal text.
    pub fn csv(&self) -> String {
        match self {
            // drop the sign of zero
            Cell::Real(x) => format!("{:e}", if *x == 0.0 { 0.0 } else { *x }),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => t.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) if x.is_finite() => json!(x),
            Cell::Real(x) => json!(x.to_string()),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(t) => json!(t),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&'static str> for Cell {
    fn from(t: &'static str) -> Self {
        Cell::Text(t)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results that do not fit the rows, in insertion order.
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self { command: command.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format, config: &RunConfig) -> String {
        match format {
            Format::Csv => self.csv(config),
            Format::Json => self.json(config),
        }
    }

    /// Metadata as `#` lines, then the header row and the data rows.
    fn csv(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        out.push_str(&format!("# vdw-core {}\n", vdw_core::VERSION));
        out.push_str(&format!("# command {}\n", self.command));
        out.push_str(&format!("# config_sha256 {}\n", config.hash()));
        out.push_str(&format!("# config {}\n", serde_json::to_string(&config.resolved()).expect("config serializes")));
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} {}\n", v.csv()));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, config: &RunConfig) -> String {
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({
            "version": vdw_core::VERSION,
            "command": self.command,
            "config_sha256": config.hash(),
            "config": config.resolved(),
            "summary": summary,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }
}
