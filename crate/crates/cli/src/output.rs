//! Artifact formatting: CSV with 17 significant digits, schema-tagged JSON.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

/// Artifacts to write plus the invariant failures observed while computing them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn push(&mut self, file: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact { file: file.into(), contents });
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn check(&mut self, condition: bool, msg: impl FnOnce() -> String) {
        if !condition {
            self.failures.push(msg());
        }
    }
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table whose cells are already formatted.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Adds `schema` and `subcommand` keys to a JSON object report.
pub fn report(subcommand: &str, body: Value) -> Value {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("schema".into(), Value::String(ergodix::SCHEMA.into()));
    map.insert("subcommand".into(), Value::String(subcommand.into()));
    Value::Object(map)
}

pub fn complex(z: ergodix::Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}
