use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

/// A complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

pub fn cx(re: f64, im: f64) -> Cx {
    Cx { re, im }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub params: Value,
    pub version: &'static str,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &'static str, params: Value, tolerances: &[(&'static str, f64)]) -> Self {
        Self {
            command,
            params,
            version: env!("CARGO_PKG_VERSION"),
            tolerances: tolerances.iter().copied().collect(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Tabular view of a result for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Formats a float with the shortest round-trip representation.
pub fn num(x: f64) -> String {
    let v = json!(x);
    if v.is_null() {
        x.to_string()
    } else {
        v.to_string()
    }
}

/// A computed result: the full JSON value, its tabular form, and whether
/// every tolerance was met.
pub struct Outcome {
    pub result: Value,
    pub table: Table,
    pub ok: bool,
}

fn render(manifest: &RunManifest, outcome: &Outcome, format: Format) -> std::io::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "ok": outcome.ok, "result": outcome.result });
            let mut s = serde_json::to_vec_pretty(&doc)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# manifest: {}", serde_json::to_string(manifest)?)?;
            writeln!(out, "# ok: {}", outcome.ok)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&outcome.table.header)?;
            for r in &outcome.table.rows {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
    }
}

/// Writes to `<dir>/<command>.<ext>` when a directory is given, else to stdout.
pub fn emit(
    manifest: &RunManifest,
    outcome: &Outcome,
    format: Format,
    out_dir: Option<&Path>,
) -> std::io::Result<Option<PathBuf>> {
    let bytes = render(manifest, outcome, format)?;
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.{}", manifest.command, format.extension()));
            fs::write(&path, bytes)?;
            Ok(Some(path))
        }
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(None)
        }
    }
}

/// Machine-readable failure record, written to stderr.
pub fn error_record(manifest: &RunManifest, kind: &str, message: &str) -> String {
    serde_json::to_string(&json!({
        "manifest": manifest,
        "error": { "kind": kind, "message": message },
    }))
    .expect("error record serializes")
}
