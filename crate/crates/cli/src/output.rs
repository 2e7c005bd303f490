//! CSV and JSON rendering of flat tables.
//!
//! Reals are written in shortest round-trip form, in plain notation for
//! `1e-5 ≤ |x| < 1e16` and in exponent notation otherwise, so reruns are
//! byte-identical. Missing values are empty CSV fields and JSON `null`.
//! Run metadata goes on a single leading `#` line (CSV) or a `metadata`
//! object (JSON).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value as Json};

use crate::args::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Count(usize),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Count(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Real(x) => format_real(*x),
        Cell::Count(n) => n.to_string(),
        Cell::Missing => String::new(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_value(cell: &Cell) -> Json {
    match cell {
        Cell::Real(x) => serde_json::Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Cell::Count(n) => Json::from(*n),
        Cell::Text(s) => Json::from(s.as_str()),
        Cell::Missing => Json::Null,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Ordered `key=value` pairs describing the run.
    pub metadata: Vec<(&'static str, String)>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn meta(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.metadata.push((key, value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn header(&self) -> String {
        self.columns.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.metadata.is_empty() {
            let meta: Vec<String> = self.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("# {}\n", meta.join(" ")));
        }
        out.push_str(&self.header());
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Json {
        let meta: Map<String, Json> = self.metadata.iter().map(|(k, v)| (k.to_string(), Json::from(v.as_str()))).collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> =
                    self.columns.iter().zip(row).map(|(c, cell)| (c.to_string(), json_value(cell))).collect();
                Json::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("metadata".into(), Json::Object(meta));
        top.insert("columns".into(), Json::from(self.columns.to_vec()));
        top.insert("rows".into(), Json::Array(rows));
        Json::Object(top)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("tables serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(8.0), "8");
        assert_eq!(format_real(0.1), "0.1");
        assert_eq!(format_real(1e-7), "1e-7");
        assert_eq!(format_real(-2.5e20), "-2.5e20");
        assert_eq!(format_real(1.0 / 3.0), "0.3333333333333333");
        for x in [1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI, -1e-5] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_real(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.meta("command", "test");
        t.push(vec![1.5.into(), Cell::Missing, "x,y".into()]);
        assert_eq!(t.to_csv(), "# command=test\na,b,c\n1.5,,\"x,y\"\n");
        let j = t.to_json();
        assert_eq!(j["rows"][0]["b"], Json::Null);
        assert_eq!(j["metadata"]["command"], "test");
    }
}
