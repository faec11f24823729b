//! Flat result records and their CSV / JSON-lines encodings.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Version of the record layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

/// A single value in a record.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

/// Non-finite doubles are written as the strings `inf`, `-inf`, `nan`.
fn float_text(v: f64) -> Option<&'static str> {
    if v.is_nan() {
        Some("nan")
    } else if v == f64::INFINITY {
        Some("inf")
    } else if v == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => match float_text(*v) {
                Some(t) => t.to_string(),
                None => format!("{v:.16e}"),
            },
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(v) => match float_text(*v) {
                Some(t) => Value::from(t),
                None => Value::from(*v),
            },
            Cell::Bool(b) => Value::from(*b),
            Cell::Str(s) => Value::from(s.as_str()),
        }
    }
}

/// Ordered key–value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(String, Cell)>);

impl Record {
    pub fn new(kind: &str) -> Self {
        let mut r = Record::default();
        r.push("schema_version", Cell::Int(SCHEMA_VERSION as i64));
        r.push("record", kind);
        r
    }

    pub fn push(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key.to_string(), value)),
        }
        self
    }

    pub fn opt(&mut self, key: &str, value: Option<impl Into<Cell>>) -> &mut Self {
        if let Some(v) = value {
            self.push(key, v);
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn fields(&self) -> &[(String, Cell)] {
        &self.0
    }
}

/// Writes records as CSV: one header row (union of keys in first-seen
/// order), empty cells for missing keys.
pub fn to_csv(records: &[Record]) -> String {
    let mut header: Vec<&str> = Vec::new();
    for r in records {
        for (k, _) in &r.0 {
            if !header.contains(&k.as_str()) {
                header.push(k);
            }
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = header.iter().map(|h| r.get(h).map(Cell::csv).unwrap_or_default()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One JSON object per line.
pub fn to_json_lines(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        let map: Map<String, Value> = r.0.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        out.push_str(&Value::Object(map).to_string());
        out.push('\n');
    }
    out
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Csv => to_csv(records),
        Format::JsonLines => to_json_lines(records),
    }
}

/// Space-separated `re±imi` entries, 17 significant digits.
pub fn vector_text(v: &[Complex64]) -> String {
    let mut s = String::new();
    for (i, z) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{:.16e}{:+.16e}i", z.re, z.im).expect("write to string");
    }
    s
}

/// Rows joined by `;`, entries as `+`/`-`.
pub fn sign_text(rows: &[Vec<i8>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect::<String>())
        .collect::<Vec<_>>()
        .join(";")
}
