use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

/// One experiment's result: flat rows plus run metadata for JSON.
pub struct Artifact {
    pub kind: &'static str,
    pub meta: Value,
    csv: Vec<u8>,
    rows: Value,
}

impl Artifact {
    pub fn new<R: Serialize>(kind: &'static str, meta: Value, rows: &[R]) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let csv = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        let rows = serde_json::to_value(rows).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Artifact { kind, meta, csv, rows })
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let doc = json!({ "kind": self.kind, "meta": self.meta, "rows": self.rows });
                let mut out = serde_json::to_vec_pretty(&doc).expect("json values serialize");
                out.push(b'\n');
                out
            }
        }
    }
}

/// Writes to a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
