//! Result tables and their serialized forms.
//!
//! Every command produces one [`ResultRecord`]: the config echo, a metadata
//! map naming the conventions the numbers rely on, and a rectangular table.
//! The CSV form carries the config and metadata as `#`-prefixed comment
//! lines above the header; the JSON form is a single object with `config`,
//! `metadata`, and `rows` keys. Floats are written with 17 significant
//! digits in CSV so either form parses back to the same values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::config::{ExperimentConfig, OutputFormat};

/// One table cell. `Empty` marks columns that do not apply to a row kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Uint(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: &str) -> Cell {
        Cell::Text(s.to_owned())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Uint(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Empty => Value::Null,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Uint(v) => v.to_string(),
            // 17 significant digits: enough to reconstruct the exact f64.
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(v) => csv_escape(v),
            Cell::Empty => String::new(),
        }
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// A finished run: config echo, convention notes, and the output table.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Reported on stderr only; never serialized, so reruns stay
    /// byte-identical.
    pub wall_clock_seconds: f64,
}

impl ResultRecord {
    pub fn new(config: ExperimentConfig, columns: Vec<&'static str>) -> ResultRecord {
        let mut metadata = BTreeMap::new();
        metadata.insert("artifact_version".into(), env!("CARGO_PKG_VERSION").into());
        metadata.insert("log_base".into(), "2".into());
        metadata.insert(
            "length_convention".into(),
            "ideal code length: negative log2 sequence probability".into(),
        );
        ResultRecord {
            config,
            metadata,
            columns,
            rows: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_owned(), value.to_string());
    }

    /// Rejects ragged rows and non-finite numbers before anything is written.
    pub fn validate(&self) -> Result<(), String> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(format!(
                    "row {i} has {} cells, table has {} columns",
                    row.len(),
                    self.columns.len()
                ));
            }
            for (cell, col) in row.iter().zip(&self.columns) {
                if let Cell::Float(v) = cell {
                    if !v.is_finite() {
                        return Err(format!("column {col} in row {i} is not finite: {v}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let metadata = serde_json::to_string(&self.metadata).expect("metadata serializes");
        writeln!(out, "# config: {config}").unwrap();
        writeln!(out, "# metadata: {metadata}").unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_csv_field).collect();
            writeln!(out, "{}", fields.join(",")).unwrap();
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, cell)| ((*col).to_owned(), cell.to_json()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let object = json!({
            "config": self.config,
            "metadata": self.metadata,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&object).expect("record serializes");
        text.push('\n');
        text
    }
}
