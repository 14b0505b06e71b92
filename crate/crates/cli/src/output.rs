//! File emission. Every file starts with the run metadata: `#` lines for
//! CSV, a `metadata` object for JSON, an XML comment for SVG.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub type Metadata = Vec<(String, String)>;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_text(meta: &Metadata, header: &[String], rows: &[Vec<f64>]) -> Result<String, CliError> {
    let mut out = String::new();
    for (k, v) in meta {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(format!("csv encoding: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| num(x))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv encoding: {e}")))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is ASCII"));
    Ok(out)
}

pub fn metadata_json(meta: &Metadata) -> Value {
    Value::Object(meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
}

/// `body` with the metadata object inserted first.
pub fn json_text(meta: &Metadata, body: Value) -> String {
    let mut obj = Map::new();
    obj.insert("metadata".into(), metadata_json(meta));
    match body {
        Value::Object(fields) => obj.extend(fields),
        other => {
            obj.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn table_json(meta: &Metadata, header: &[String], rows: &[Vec<f64>]) -> String {
    json_text(meta, json!({ "columns": header, "rows": rows }))
}

/// Writes a numeric table in the configured format; returns the path used.
pub fn write_table(
    dir: &Path,
    stem: &str,
    format: Format,
    meta: &Metadata,
    header: &[String],
    rows: &[Vec<f64>],
) -> Result<PathBuf, CliError> {
    let (path, text) = match format {
        Format::Csv => (dir.join(format!("{stem}.csv")), csv_text(meta, header, rows)?),
        Format::Json => (dir.join(format!("{stem}.json")), table_json(meta, header, rows)),
    };
    write_file(&path, &text)?;
    Ok(path)
}

pub fn write_json(path: &Path, meta: &Metadata, body: Value) -> Result<(), CliError> {
    write_file(path, &json_text(meta, body))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Creates `dir` if needed and checks that files can be written there.
pub fn ensure_writable(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let probe = dir.join(".jcrabi-write-probe");
    fs::write(&probe, b"").map_err(|e| CliError::io(dir, e))?;
    fs::remove_file(&probe).map_err(|e| CliError::io(&probe, e))
}
