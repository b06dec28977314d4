//! Reports and their text and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub results: Map<String, Value>,
    /// `None` for commands that only compute.
    pub checks: Option<Vec<Check>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            results: Map::new(),
            checks: None,
            warnings: Vec::new(),
        }
    }

    pub fn insert<T: Serialize>(&mut self, key: &str, value: T) {
        let value = serde_json::to_value(value).expect("report values serialize");
        self.results.insert(key.to_string(), value);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.get_or_insert_with(Vec::new).push(Check {
            name: name.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        });
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .flatten()
            .all(|c| c.status == Status::Pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    fn status_label(&self) -> Option<&'static str> {
        let checks = self.checks.as_ref()?;
        Some(if checks.is_empty() {
            "no checks run"
        } else if self.passed() {
            "PASS"
        } else {
            "FAIL"
        })
    }

    pub fn to_json(&self) -> Value {
        let mut out = self.results.clone();
        out.insert("command".into(), Value::String(self.command.clone()));
        out.insert(
            "warnings".into(),
            serde_json::to_value(&self.warnings).expect("strings"),
        );
        if let Some(checks) = &self.checks {
            out.insert(
                "checks".into(),
                serde_json::to_value(checks).expect("checks serialize"),
            );
        }
        if let Some(status) = self.status_label() {
            out.insert("status".into(), Value::String(status.into()));
        }
        Value::Object(out)
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        rows.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            rows.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), item, rows);
            }
        }
        Value::Object(map) if map.is_empty() => rows.push((prefix.to_string(), "{}".into())),
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, item, rows);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

fn table(rows: &[(String, String)], indent: &str, out: &mut String) {
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in rows {
        let pad = width - k.chars().count();
        let _ = writeln!(out, "{indent}{k}{}  {v}", " ".repeat(pad));
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let mut rows = vec![("command".to_string(), report.command.clone())];
    flatten("", &Value::Object(report.results.clone()), &mut rows);
    if report.results.is_empty() {
        rows.pop();
    }
    table(&rows, "", &mut out);
    if let Some(checks) = &report.checks {
        if checks.is_empty() {
            let _ = writeln!(out, "no checks run");
        } else {
            let _ = writeln!(out, "checks:");
            let rows: Vec<(String, String)> = checks
                .iter()
                .map(|c| {
                    let detail = if c.detail.is_empty() {
                        String::new()
                    } else {
                        format!("  {}", c.detail)
                    };
                    (c.name.clone(), format!("{}{detail}", c.status.label()))
                })
                .collect();
            table(&rows, "  ", &mut out);
            let _ = writeln!(
                out,
                "status: {}",
                report.status_label().expect("checks present")
            );
        }
    }
    out
}

/// Deterministic rendering; JSON keys are sorted.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
            s.push('\n');
            s
        }
    }
}
