//! JSON and CSV artifacts. Every file carries the schema string
//! `extremal-annulus/1`; non-finite numbers are written as JSON `null`.

use std::fs;
use std::path::{Path, PathBuf};

use extremal_core::field::io::MAGIC;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "extremal-annulus/1";

/// Writes `value` (an object) as `dir/name` with a leading `schema` field.
pub fn write_json(dir: &Path, name: &str, command: &str, value: Value) -> anyhow::Result<PathBuf> {
    let mut obj = Map::new();
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("command".into(), command.into());
    match value {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(&Value::Object(obj))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    /// Starts with the schema line, a `# kind[,meta...]` line and the column header.
    pub fn new(kind: &str, meta: &[(&str, String)], columns: &[&str]) -> Self {
        let mut text = format!("{MAGIC}\n# {kind}");
        for (k, v) in meta {
            text.push_str(&format!(",{k}={v}"));
        }
        text.push('\n');
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let cells: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn write(&self, dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, &self.text)?;
        Ok(path)
    }
}
