//! JSON and CSV emission.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A CSV-shaped grid. JSON output renders it as a list of records.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a command produced: a JSON document and, for grids, the CSV table.
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
}

impl Output {
    pub fn record(json: Value) -> Self {
        Self { json, table: None }
    }

    pub fn grid(table: Table) -> Self {
        Self {
            json: table.to_json(),
            table: Some(table),
        }
    }

    pub fn both(json: Value, table: Table) -> Self {
        Self {
            json,
            table: Some(table),
        }
    }
}

/// 17 significant digits, so that the text parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.16e}")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (None, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_float(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// A JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Flattens a record into a one-row table; nested values stay JSON text.
fn record_table(json: &Value) -> Table {
    match json {
        Value::Object(map) => Table {
            columns: map.keys().cloned().collect(),
            rows: vec![map.values().cloned().collect()],
        },
        other => Table {
            columns: vec!["value".into()],
            rows: vec![vec![other.clone()]],
        },
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<W: Write>(output: &Output, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &output.json)?;
            writeln!(out)?;
        }
        Format::Csv => match &output.table {
            Some(t) => write_csv(t, out)?,
            None => write_csv(&record_table(&output.json), out)?,
        },
    }
    Ok(())
}
