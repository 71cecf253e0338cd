//! Data tables, side files and the run manifest.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::config::Resolved;

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) if x.is_nan() => "NaN".into(),
            Cell::Float(x) => if x > 0.0 { "inf" } else { "-inf" }.into(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
        }
    }
}

pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect()))
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn float(x: f64) -> Cell {
    Cell::Float(x)
}

pub fn int<T: Into<i64>>(x: T) -> Cell {
    Cell::Int(x.into())
}

pub struct Run {
    name: &'static str,
    format: Format,
    output: String,
    raw_units: bool,
    threads: Option<usize>,
    parameters: Value,
    results: Map<String, Value>,
    files: Vec<String>,
}

impl Run {
    pub fn new(r: &Resolved) -> Self {
        let name = r.command.name();
        let format = r.global.format.unwrap_or(Format::Csv);
        let output = r.global.output.clone().unwrap_or_else(|| format!("{name}.{}", format.extension()));
        Self {
            name,
            format,
            output,
            raw_units: r.global.raw_units,
            threads: r.global.threads,
            parameters: Value::Null,
            results: Map::new(),
            files: vec![],
        }
    }

    pub fn raw_units(&self) -> bool {
        self.raw_units
    }

    pub fn set_parameters(&mut self, p: Value) {
        self.parameters = p;
    }

    /// Scalar results worth keeping next to the parameters.
    pub fn record(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }

    fn to_stdout(&self) -> bool {
        self.output == "-"
    }

    /// `<output stem>.<suffix>`, or `<subcommand>.<suffix>` when writing to stdout.
    fn side_path(&self, suffix: &str) -> PathBuf {
        if self.to_stdout() {
            return PathBuf::from(format!("{}.{suffix}", self.name));
        }
        let p = PathBuf::from(&self.output);
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| self.name.into());
        p.with_file_name(format!("{stem}.{suffix}"))
    }

    fn write_file(&mut self, path: PathBuf, contents: &str) -> Result<(), String> {
        fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        self.files.push(path.display().to_string());
        Ok(())
    }

    pub fn write_table(&mut self, table: &Table) -> Result<(), String> {
        let text = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        if self.to_stdout() {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("cannot write to stdout: {e}"))
        } else {
            self.write_file(PathBuf::from(&self.output), &text)
        }
    }

    pub fn write_side_json(&mut self, suffix: &str, v: &Value) -> Result<(), String> {
        let mut text = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
        text.push('\n');
        let path = self.side_path(suffix);
        self.write_file(path, &text)
    }

    pub fn finish(self, started_unix: f64, wall: Duration) -> Result<(), String> {
        let manifest = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.name,
            "parameters": self.parameters,
            "results": self.results,
            "output": self.output,
            "format": self.format,
            "raw_units": self.raw_units,
            "threads": self.threads.unwrap_or_else(rayon::current_num_threads),
            "files": self.files,
            "started_unix": started_unix,
            "wall_time_seconds": wall.as_secs_f64(),
        });
        let path = if self.to_stdout() {
            PathBuf::from(format!("{}.manifest.json", self.name))
        } else {
            PathBuf::from(format!("{}.manifest.json", self.output))
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(float(1.0).csv(), "1.0000000000000000e0");
        assert_eq!(float(-0.1).csv(), "-1.0000000000000001e-1");
        assert_eq!(float(f64::NAN).csv(), "NaN");
        assert_eq!(int(42).csv(), "42");
        assert_eq!(float(f64::NAN).json(), Value::Null);
    }

    #[test]
    fn csv_and_json_tables() {
        let mut t = Table::new(&["N", "x"]);
        t.push(vec![int(2), float(0.5)]);
        assert_eq!(t.to_csv(), "N,x\n2,5.0000000000000000e-1\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v, json!([{ "N": 2, "x": 0.5 }]));
    }
}
