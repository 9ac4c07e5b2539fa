use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::io::InputDigest;

/// Envelope for every command's output. Only `timing_ms` varies between
/// runs with identical inputs and flags.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, InputDigest>,
    pub mode: &'static str,
    pub result: Value,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command.join(" ")).unwrap();
        for (role, d) in &self.inputs {
            writeln!(out, "input {role}: {} (sha256 {})", d.path, d.sha256).unwrap();
        }
        writeln!(out, "mode: {}", self.mode).unwrap();
        render(&self.result, 0, &mut out);
        writeln!(out, "time: {} ms", self.timing_ms).unwrap();
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(xs.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", "))
        }
        Value::Array(xs) if xs.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            Some(xs.iter().map(|x| format!("[{}]", scalar(x).unwrap())).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}{k}: {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}{k}:").unwrap();
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match scalar(x) {
                    Some(s) => writeln!(out, "{pad}[{i}] {s}").unwrap(),
                    None => {
                        writeln!(out, "{pad}[{i}]").unwrap();
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}{}", scalar(other).unwrap_or_default()).unwrap(),
    }
}
