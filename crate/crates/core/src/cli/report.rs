//! Reports emitted by every command, in JSON or plain text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::funbackend::Certificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEntry {
    /// 1-based diagonal entry.
    pub entry: Option<usize>,
    /// Exact rational `"p/q"`.
    pub point: String,
}

impl From<&Certificate> for CertificateEntry {
    fn from(c: &Certificate) -> Self {
        CertificateEntry {
            entry: c.entry,
            point: c.point.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
}

/// Fields are declared in alphabetical order so the JSON form is key-sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub backend: Option<String>,
    pub certificate: Option<CertificateEntry>,
    pub command: String,
    pub errors: Vec<ErrorEntry>,
    pub objects: BTreeMap<String, Value>,
    pub problem: Option<String>,
    pub residuals: BTreeMap<String, f64>,
    pub status: Status,
    pub values: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, bool>,
}

/// Rebuild a value with every object's keys in sorted order.
pub fn sorted(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sorted(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

/// JSON cannot carry infinities or NaN; they become `null` in values and
/// the largest finite float in residuals.
fn finite_value(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn residual(&mut self, name: &str, v: f64) {
        let v = if v.is_nan() {
            f64::MAX
        } else {
            v.abs().min(f64::MAX)
        };
        self.residuals.insert(name.to_string(), v);
    }

    pub fn residuals_from(&mut self, map: &BTreeMap<String, f64>) {
        for (k, &v) in map {
            self.residual(k, v);
        }
    }

    pub fn verdict(&mut self, name: &str, v: bool) {
        self.verdicts.insert(name.to_string(), v);
    }

    pub fn value(&mut self, name: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.values.insert(name.to_string(), sorted(v));
    }

    pub fn number(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), finite_value(v));
    }

    pub fn object(&mut self, name: &str, v: Value) {
        self.objects.insert(name.to_string(), sorted(v));
    }

    pub fn error(&mut self, kind: &str, message: impl Into<String>) {
        self.status = Status::Error;
        self.errors.push(ErrorEntry {
            kind: kind.to_string(),
            message: message.into(),
        });
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command:  {}", self.command);
        if let Some(b) = &self.backend {
            let _ = writeln!(out, "backend:  {b}");
        }
        if let Some(p) = &self.problem {
            let _ = writeln!(out, "problem:  {p}");
        }
        let status = match self.status {
            Status::Ok => "ok",
            Status::Error => "error",
        };
        let _ = writeln!(out, "status:   {status}");

        if !self.verdicts.is_empty() {
            let _ = writeln!(out, "\nverdicts");
            let w = self.verdicts.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in &self.verdicts {
                let _ = writeln!(out, "  {k:<w$}  {v}");
            }
        }
        if let Some(c) = &self.certificate {
            match c.entry {
                Some(e) => {
                    let _ = writeln!(out, "\ncertificate: entry {e}, point {}", c.point);
                }
                None => {
                    let _ = writeln!(out, "\ncertificate: point {}", c.point);
                }
            }
        }
        if !self.residuals.is_empty() {
            let _ = writeln!(out, "\nresiduals");
            let w = self
                .residuals
                .keys()
                .map(String::len)
                .max()
                .unwrap_or(0)
                .max(8);
            let _ = writeln!(out, "  {:<w$}  {:>10}", "identity", "residual");
            let _ = writeln!(out, "  {}  {}", "-".repeat(w), "-".repeat(10));
            for (k, v) in &self.residuals {
                let _ = writeln!(out, "  {k:<w$}  {v:>10.3e}");
            }
        }
        if !self.values.is_empty() {
            let _ = writeln!(out, "\nvalues");
            for (k, v) in &self.values {
                let _ = writeln!(out, "  {k}: {}", compact(v));
            }
        }
        if !self.objects.is_empty() {
            let names: Vec<&str> = self.objects.keys().map(String::as_str).collect();
            let _ = writeln!(
                out,
                "\nobjects: {} (payloads in json output)",
                names.join(", ")
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "\nerror ({}): {}", e.kind, e.message);
        }
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 100 {
        format!(
            "{}...",
            &s[..s.char_indices().nth(97).map_or(s.len(), |(i, _)| i)]
        )
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("polar");
        r.backend = Some("matrix".into());
        r.verdict("polar_exists", true);
        r.residual("t=V|t|", 1.5e-16);
        r.number("norm", 2.0);
        r.object("V", serde_json::json!({"b": 1, "a": [0.5, -1.0]}));
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn json_keys_sorted() {
        let json = sample().to_json();
        let keys: Vec<usize> = [
            "\"backend\"",
            "\"certificate\"",
            "\"command\"",
            "\"errors\"",
            "\"objects\"",
            "\"problem\"",
            "\"residuals\"",
            "\"status\"",
            "\"values\"",
            "\"verdicts\"",
        ]
        .iter()
        .map(|k| json.find(k).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.find("\"a\"").unwrap() < json.find("\"b\"").unwrap());
    }

    #[test]
    fn text_and_json_carry_same_verdicts() {
        let r = sample();
        let text = r.to_text();
        for (k, v) in &r.verdicts {
            assert!(text.contains(&format!("{k}  {v}")));
        }
    }

    #[test]
    fn empty_residuals_have_no_table() {
        let mut r = Report::new("check-complemented");
        r.verdict("complemented", false);
        assert!(!r.to_text().contains("residuals"));
        assert!(sample().to_text().contains("residuals"));
    }

    #[test]
    fn non_finite_residuals_are_clamped() {
        let mut r = Report::new("x");
        r.residual("a", f64::INFINITY);
        r.number("b", f64::NAN);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.residuals["a"], f64::MAX);
        assert_eq!(back.values["b"], Value::Null);
    }
}
