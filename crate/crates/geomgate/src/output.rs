//! Rendering and emission of documents.
//!
//! JSON is pretty-printed serde output.  CSV comes in two shapes: sweeps
//! render as a wide table (one row per grid point), every other document
//! flattens to `field,value` rows with dotted paths.  Floats print as
//! `{:.16e}` (17 significant digits, '.' decimal, no locale), enough to
//! round-trip any f64.

use std::path::Path;

use serde::Serialize;

use crate::document::SweepResult;
use crate::CliError;

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

fn format_number(n: &serde_json::Number) -> String {
    if let Some(u) = n.as_u64() {
        u.to_string()
    } else if let Some(i) = n.as_i64() {
        i.to_string()
    } else {
        format_f64(n.as_f64().expect("JSON numbers fit f64"))
    }
}

fn flatten(value: &serde_json::Value, path: &str, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (key, child) in map {
                let sub = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                flatten(child, &sub, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, &format!("{path}.{i}"), rows);
            }
        }
        serde_json::Value::Null => rows.push((path.to_string(), String::new())),
        serde_json::Value::Bool(b) => rows.push((path.to_string(), b.to_string())),
        serde_json::Value::Number(n) => rows.push((path.to_string(), format_number(n))),
        serde_json::Value::String(s) => rows.push((path.to_string(), s.clone())),
    }
}

/// `field,value` rows over dotted paths, in document order.
pub fn to_flat_csv<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents always serialize");
    let mut rows = Vec::new();
    flatten(&value, "", &mut rows);
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["field", "value"]).expect("in-memory write");
    for (field, val) in rows {
        writer.write_record([field.as_str(), val.as_str()]).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flushed")).expect("csv output is utf-8")
}

/// Wide sweep table; data cells of failed points are empty and the error
/// message rides in the last column.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = result.columns.iter().map(String::as_str).collect();
    header.push("error");
    writer.write_record(&header).expect("in-memory write");
    for (cells, error) in result.rows.iter().zip(result.errors.iter()) {
        let mut record: Vec<String> = cells
            .iter()
            .map(|c| c.map(format_f64).unwrap_or_default())
            .collect();
        record.push(error.clone().unwrap_or_default());
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flushed")).expect("csv output is utf-8")
}

/// Writes to `out` when given, otherwise to stdout unless `quiet`.
pub fn emit(text: &str, out: Option<&Path>, quiet: bool) -> Result<(), CliError> {
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| {
            CliError::Config(format!("cannot write output {}: {e}", path.display()))
        })?;
    } else if !quiet {
        print!("{text}");
    }
    Ok(())
}
