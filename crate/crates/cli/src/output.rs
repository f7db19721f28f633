use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Rounds to 10 significant digits.
pub fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

pub fn fmt(x: f64) -> String {
    let r = sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(x) = n.as_f64() {
                if let Some(m) = serde_json::Number::from_f64(sig(x)) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub parameters: Value,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: &impl Serialize, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io { file: path.display().to_string(), message: e.to_string() })?;
        self.inputs.insert(path.display().to_string(), format!("{:x}", Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|e| CliError::Parse {
            file: path.display().to_string(),
            line: 0,
            column: 0,
            message: e.to_string(),
        })
    }
}

/// Comma-separated table with a header row.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt(x)).collect());
    }

    pub fn push_raw(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).unwrap();
        for r in &self.rows {
            w.write_record(r).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

pub enum Primary {
    Csv(Table),
    Json(Value),
}

pub struct Rendered {
    pub primary: Primary,
    pub extra: Vec<(PathBuf, Table)>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { file: path.display().to_string(), message: e.to_string() })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn json_text(mut v: Value) -> String {
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).unwrap();
    s.push('\n');
    s
}

/// Writes the primary result to `out` or stdout, and each extra table to its
/// own file with a manifest sidecar.
pub fn emit(rendered: Rendered, manifest: &RunManifest, out: Option<&Path>) -> Result<(), CliError> {
    let manifest_value = serde_json::to_value(manifest).unwrap();
    let text = match rendered.primary {
        Primary::Json(mut v) => {
            if let Value::Object(o) = &mut v {
                o.insert("manifest".into(), manifest_value.clone());
            }
            json_text(v)
        }
        Primary::Csv(t) => {
            if let Some(path) = out {
                write(&sidecar(path), &json_text(manifest_value.clone()))?;
            }
            t.render()
        }
    };
    match out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    for (path, table) in rendered.extra {
        write(&path, &table.render())?;
        write(&sidecar(&path), &json_text(manifest_value.clone()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt(853.2551234567891), "853.2551235");
        assert_eq!(fmt(4.532296307421936e-6), "4.532296307e-6");
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(-1.0), "-1");
    }

    #[test]
    fn json_keys_sorted_and_rounded() {
        let v = serde_json::json!({"b": 1.234567890123, "a": [0.1, 3]});
        assert_eq!(json_text(v), "{\n  \"a\": [\n    0.1,\n    3\n  ],\n  \"b\": 1.23456789\n}\n");
    }
}
