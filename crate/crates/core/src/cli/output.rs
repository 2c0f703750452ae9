use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::Rational;

/// Shortest decimal that reads back to the same `f64`; exponent form outside
/// `[1e-5, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Integers as JSON numbers, everything else as `"p/q"`.
pub fn rational_json(q: Rational) -> Value {
    if q.is_integer() {
        json!(q.to_integer())
    } else {
        json!(q.to_string())
    }
}

/// CSV text with `\n` line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Files produced by one command, written into an output directory.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Write every file plus `manifest.json`; returns the paths written.
    pub fn write(&self, dir: &Path, command: &str, config: &str) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            written.push(path);
        }
        let manifest = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "files": self.names(),
            "config": config,
        });
        let path = dir.join("manifest.json");
        fs::write(&path, to_json_text(&manifest))?;
        written.push(path);
        Ok(written)
    }
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(0.1), "0.1");
        assert_eq!(fmt_float(1.5e-7), "1.5e-7");
        assert_eq!(fmt_float(2e16), "2e16");
        assert_eq!(fmt_float(-123.25), "-123.25");
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, 1e-300, 0.00001] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(rational_json(Rational::from(-2)), json!(-2));
        assert_eq!(rational_json(Rational::new(5, 2)), json!("5/2"));
    }

    #[test]
    fn csv_lines() {
        let mut c = Csv::new(&["t", "g"]);
        c.row(&["0.5".into(), "1".into()]);
        assert_eq!(c.into_string(), "t,g\n0.5,1\n");
    }
}
