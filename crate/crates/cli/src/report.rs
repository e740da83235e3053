use serde::Serialize;
use serde_json::{json, Map, Value};

use gammaring::axioms::Witness;
use gammaring::GammaRing;

/// Overall verdict of a command; decides the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Partial,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Partial => 3,
        }
    }

    /// Failure dominates partiality, which dominates a pass.
    pub fn merge(self, other: Outcome) -> Outcome {
        self.max(other)
    }
}

pub struct Report {
    pub command: &'static str,
    pub options: Value,
    pub outcome: Outcome,
    pub body: Value,
}

pub const SCHEMA: u32 = 1;

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "options": self.options,
            "outcome": self.outcome,
            "result": self.body,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_value(&self.to_json(), 0, &mut out);
        out
    }
}

/// Slot kinds for witness tuples: `M` element, `G` Gamma element, anything
/// else is printed as a bare index.
pub fn render_witness(r: &GammaRing, w: &Witness, pattern: &str) -> Value {
    let kinds: Vec<char> = pattern.chars().collect();
    let rendered: Vec<Value> = w
        .tuple
        .iter()
        .enumerate()
        .map(|(i, &v)| match kinds.get(i) {
            Some('M') if v < r.m_order() => Value::String(format!("M:{}", r.render_m(v))),
            Some('G') if v < r.gamma_order() => Value::String(format!("G:{}", r.render_gamma(v))),
            _ => Value::String(v.to_string()),
        })
        .collect();
    json!({
        "tuple": w.tuple,
        "detail": w.detail,
        "rendered": rendered,
    })
}

pub fn render_optional(r: &GammaRing, w: &Option<Witness>, pattern: &str) -> Value {
    match w {
        Some(w) => render_witness(r, w, pattern),
        None => Value::Null,
    }
}

/// `M G M G ... M` for an n-fold product tuple.
pub fn product_pattern(n: usize) -> String {
    let mut p = String::from("M");
    for _ in 1..n {
        p.push_str("GM");
    }
    p
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn inline(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| is_scalar(i) || inline_array(i)),
        Value::Object(m) => m.is_empty(),
        _ => true,
    }
}

fn inline_array(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(is_scalar))
}

fn write_object(m: &Map<String, Value>, indent: usize, out: &mut String) {
    let width = m.keys().map(|k| k.len()).max().unwrap_or(0);
    let pad = " ".repeat(indent);
    for (k, v) in m {
        if inline(v) {
            let text = if let Value::Object(_) = v { "{}".to_string() } else { scalar_text(v) };
            out.push_str(&format!("{pad}{k:<width$}  {text}\n"));
        } else {
            out.push_str(&format!("{pad}{k}:\n"));
            write_value(v, indent + 2, out);
        }
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => write_object(m, indent, out),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if inline(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(item)));
                } else {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    write_value(item, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_merge_order() {
        assert_eq!(Outcome::Pass.merge(Outcome::Partial), Outcome::Partial);
        assert_eq!(Outcome::Partial.merge(Outcome::Fail), Outcome::Fail);
        assert_eq!(Outcome::Fail.exit_code(), 1);
        assert_eq!(Outcome::Partial.exit_code(), 3);
    }

    #[test]
    fn text_is_aligned() {
        let mut out = String::new();
        write_value(&json!({"a": 1, "long_key": [1, 2], "nested": {"x": true}}), 0, &mut out);
        assert_eq!(out, "a         1\nlong_key  [1, 2]\nnested:\n  x  true\n");
    }

    #[test]
    fn patterns() {
        assert_eq!(product_pattern(3), "MGMGM");
        let r = GammaRing::matrix(2, 1, 1).unwrap();
        let w = Witness::new(vec![1, 1, 7], "t");
        let v = render_witness(&r, &w, "MG");
        assert_eq!(v["rendered"], json!(["M:[1]", "G:[1]", "7"]));
    }
}
