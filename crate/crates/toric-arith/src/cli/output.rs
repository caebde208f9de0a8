use std::fs;
use std::io;
use std::path::Path;

use serde_json::Value;

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Rounds every number in a JSON tree to 12 significant digits so that
/// output bytes do not depend on last-bit noise.
pub fn round_sig(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .map(|x| Value::from(sig12(x)))
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.iter().map(round_sig).collect()),
        Value::Object(o) => {
            Value::Object(o.iter().map(|(k, x)| (k.clone(), round_sig(x))).collect())
        }
        other => other.clone(),
    }
}

/// A tab-separated table with a header line.
#[derive(Debug, Clone)]
pub struct Tsv {
    name: String,
    text: String,
}

impl Tsv {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            text: columns.join("\t") + "\n",
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| format!("{}", sig12(x))).collect();
        self.text.push_str(&cells.join("\t"));
        self.text.push('\n');
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::write(dir.join(&self.name), &self.text)
    }
}
