//! Rendering of a finished command as JSON, CSV or plain text.

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

pub struct Outcome {
    pub params: Value,
    pub params_cell: String,
    pub finv: Value,
    pub result: Value,
    pub audit: Option<Value>,
    /// `(label, count)` rows for CSV output.
    pub rows: Vec<(String, String)>,
    pub exit: i32,
    /// Explanation printed to stderr when `exit != 0`.
    pub note: Option<String>,
}

impl Outcome {
    pub fn document(&self) -> Value {
        let mut top = Map::new();
        top.insert("params".into(), self.params.clone());
        top.insert("finv".into(), self.finv.clone());
        top.insert("result".into(), self.result.clone());
        if let Some(a) = &self.audit {
            top.insert("audit".into(), a.clone());
        }
        Value::Object(top)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.document()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["params", "label", "count"]).expect("in-memory write");
                for (label, count) in &self.rows {
                    w.write_record([self.params_cell.as_str(), label, count]).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Plain => {
                let mut out = String::new();
                let doc = self.document();
                for key in ["params", "finv", "result", "audit"] {
                    if let Some(v) = doc.get(key) {
                        let mut one = Map::new();
                        one.insert(key.into(), v.clone());
                        plain(&Value::Object(one), 0, &mut out);
                    }
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    match v {
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(map) => {
            if map.is_empty() {
                return Some("-".into());
            }
            let parts: Option<Vec<String>> =
                map.iter().map(|(k, x)| scalar(x).map(|s| format!("{k}={s}"))).collect();
            parts.map(|p| p.join(" "))
        }
        _ => None,
    }
}

fn plain(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match inline(x) {
                    Some(s) if !x.is_object() || x.as_object().is_some_and(|m| m.len() <= 4) => {
                        out.push_str(&format!("{pad}{k}: {s}\n"))
                    }
                    _ => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        plain(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        plain(x, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
