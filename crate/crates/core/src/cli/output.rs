//! CSV and JSON artifacts.

use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::config::{fmt_f64, ECHO_PREFIX};
use crate::estimator::GridRow;
use crate::sampling::SeedSpec;

/// Schema tag of every JSON document.
pub const SCHEMA: &str = "wavewalk/1";

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Grid results as CSV: `#@` config echo lines, a header row, one row per
/// query point.
pub fn grid_csv(echo: &[(String, String)], dim: usize, rows: &[GridRow]) -> String {
    let mut out = String::new();
    for (k, v) in echo {
        out.push_str(&format!("{ECHO_PREFIX} {k} = {v}\n"));
    }
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x_{i}")));
    header.extend(["mean", "stderr", "n", "method", "error"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut cells = vec![fmt_f64(row.query.t)];
        cells.extend(row.query.x.iter().map(|c| fmt_f64(*c)));
        match &row.result {
            Ok(e) => cells.extend([fmt_f64(e.mean), fmt_f64(e.stderr), e.n.to_string(), row.method.to_string(), String::new()]),
            Err(err) => cells.extend([
                String::new(),
                String::new(),
                String::new(),
                row.method.to_string(),
                csv_field(&err.to_string()),
            ]),
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn config_object(echo: &[(String, String)]) -> Value {
    Value::Object(echo.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

/// Grid results as a JSON document.
pub fn grid_json(echo: &[(String, String)], seed: SeedSpec, rows: &[GridRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let (mean, stderr, n, error) = match &row.result {
                Ok(e) => (json!(e.mean), json!(e.stderr), json!(e.n), Value::Null),
                Err(err) => (Value::Null, Value::Null, Value::Null, json!(err.to_string())),
            };
            json!({
                "t": row.query.t,
                "x": row.query.x,
                "mean": mean,
                "stderr": stderr,
                "n": n,
                "method": row.method.as_str(),
                "error": error,
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "command": "eval",
        "config": config_object(echo),
        "seed": seed,
        "rows": rows,
    })
}

pub fn json_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialise");
    s.push('\n');
    s
}
