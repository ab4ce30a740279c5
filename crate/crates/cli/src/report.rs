use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Structured command output. `ok` is false when a verification failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub ok: bool,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub key: String,
    pub value: Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ok: true, entries: Vec::new() }
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.entries.push(Entry { key: key.to_string(), value });
        self
    }

    pub fn fail(&mut self) -> &mut Self {
        self.ok = false;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One `key  value` line per entry, keys padded to a common width.
    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|e| e.key.len()).max().unwrap_or(0).max(6);
        let mut out = String::new();
        let status = if self.ok { "ok" } else { "FAILED" };
        writeln!(out, "{:width$}  {} {}", "status", self.command, status).unwrap();
        for e in &self.entries {
            writeln!(out, "{:width$}  {}", e.key, render(&e.value)).unwrap();
        }
        out
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Group orders stay numbers while they fit JSON integers.
pub fn big(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(small) => Value::from(small),
        Err(_) => Value::String(x.to_string()),
    }
}
