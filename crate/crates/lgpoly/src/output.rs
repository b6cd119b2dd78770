//! CSV and JSON emitters. CSV files open with a `# config:` comment line
//! holding the effective configuration, then a fixed header.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Common, Format};
use crate::error::CliError;

pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &Value) -> String {
        let mut s = format!("# config: {config}\n{}\n", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Writes `table` as CSV, or `body` merged with the config echo as JSON.
pub fn emit(common: &Common, config: &Value, table: &Table, body: Value) -> Result<(), CliError> {
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(config),
        Format::Json => {
            let mut doc = json!({ "config": config });
            if let (Some(map), Value::Object(extra)) = (doc.as_object_mut(), body) {
                map.extend(extra);
            }
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    write_text(common.out.as_deref(), &text)
}

/// `<dir>/<stem>.<suffix>` next to the main output file.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}
