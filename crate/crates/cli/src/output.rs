//! Report and machine-readable output writers.
//!
//! Identical inputs produce byte-identical files; the only nondeterminism
//! is the optional `--stamp` timestamp line in the human report.

use std::io::Write;
use std::path::{Path, PathBuf};

use wgmaser::Result;

/// Machine-readable output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A human-readable report accumulated line by line.
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { lines: vec![title.into(), String::new()] }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    /// A `label: value [provenance]` line.
    pub fn kv(&mut self, label: &str, value: impl std::fmt::Display, provenance: &str) {
        if provenance.is_empty() {
            self.lines.push(format!("{label}: {value}"));
        } else {
            self.lines.push(format!("{label}: {value} [{provenance}]"));
        }
    }

    pub fn blank(&mut self) {
        self.lines.push(String::new());
    }

    /// Writes `report.txt` into `dir`, optionally stamped.
    pub fn write(&self, dir: &Path, stamp: bool) -> Result<PathBuf> {
        let path = dir.join("report.txt");
        let mut f = std::fs::File::create(&path)?;
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        if stamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(f, "\nstamp: {now} s since epoch")?;
        }
        Ok(path)
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes an RFC-4180 CSV file (CRLF line endings, minimal quoting).
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push_str("\r\n");
    for row in rows {
        let escaped: Vec<String> = row.iter().map(|f| csv_escape(f)).collect();
        text.push_str(&escaped.join(","));
        text.push_str("\r\n");
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes pretty-printed JSON (sorted keys, deterministic float text).
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| wgmaser::Error::Parse(format!("json: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes rows either as CSV or as a JSON array of objects, returning the
/// created path.
pub fn write_table(
    dir: &Path,
    name: &str,
    format: Format,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf> {
    match format {
        Format::Csv => {
            let path = dir.join(format!("{name}.csv"));
            write_csv(&path, header, rows)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{name}.json"));
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (key, value) in header.iter().zip(row) {
                        // numbers stay numbers in JSON when they parse
                        let v = match value.parse::<f64>() {
                            Ok(x) if value.chars().next().is_some_and(|c| {
                                c.is_ascii_digit() || c == '-' || c == '+'
                            }) =>
                            {
                                serde_json::Number::from_f64(x)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or_else(|| serde_json::Value::String(value.clone()))
                            }
                            _ => serde_json::Value::String(value.clone()),
                        };
                        obj.insert((*key).to_string(), v);
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            write_json(&path, &serde_json::Value::Array(items))?;
            Ok(path)
        }
    }
}
