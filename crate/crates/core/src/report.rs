//! Run reports: JSON documents with a canonical config echo and FNV-1a
//! config hash, plus CSV tables. Key order is fixed (sorted maps,
//! insertion-ordered rows) so identical configs produce byte-identical
//! output.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Flat key=value configuration. Blank lines and `#` comments are
/// ignored; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key=value, got {line:?}",
                lineno + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Canonical echo: sorted `key=value` lines, one per key, trailing
/// newline. Parsing the echo reproduces it byte-identically.
pub fn canonical_config(map: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in map {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

pub fn config_hash(map: &BTreeMap<String, String>) -> String {
    format!("{:016x}", fnv1a64(canonical_config(map).as_bytes()))
}

/// One named residual check in a run.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<String>,
}

impl CheckItem {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        CheckItem {
            name: name.to_string(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
            details: None,
        }
    }

    pub fn with_details(mut self, details: String) -> Self {
        self.details = Some(details);
        self
    }

    /// A qualitative check (verdict match etc.) carrying no residual.
    pub fn qualitative(name: &str, passed: bool, details: String) -> Self {
        CheckItem {
            name: name.to_string(),
            value: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed,
            details: Some(details),
        }
    }
}

/// Top-level run report serialized to JSON.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub deterministic: bool,
    pub checks: Vec<CheckItem>,
    pub passed: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl RunReport {
    pub fn new(command: &str, config: BTreeMap<String, String>, deterministic: bool) -> Self {
        let hash = config_hash(&config);
        RunReport {
            command: command.to_string(),
            version: VERSION.to_string(),
            config,
            config_hash: hash,
            deterministic,
            checks: Vec::new(),
            passed: true,
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, item: CheckItem) {
        self.passed &= item.passed;
        self.checks.push(item);
    }

    pub fn meta(&mut self, key: &str, value: String) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| Error::Internal(format!("json serialization: {e}")))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(Error::Io)
    }
}

/// A CSV table with a fixed header; numeric cells are written with 17
/// significant digits so round-trips are exact.
#[derive(Clone, Debug)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn num(v: f64) -> String {
        format!("{v:.16e}")
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

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::Io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn config_round_trip_is_canonical() {
        let text = "# comment\nb = 2\na=1\n\nb=3\n";
        let map = parse_config(text).unwrap();
        let echo = canonical_config(&map);
        assert_eq!(echo, "a=1\nb=3\n");
        let again = parse_config(&echo).unwrap();
        assert_eq!(canonical_config(&again), echo);
        assert!(parse_config("nonsense").is_err());
    }

    #[test]
    fn report_pass_fail_aggregation() {
        let mut rep = RunReport::new("verify", BTreeMap::new(), true);
        rep.push(CheckItem::new("good", 1e-9, 1e-6));
        assert!(rep.passed);
        rep.push(CheckItem::new("bad", 1e-3, 1e-6));
        assert!(!rep.passed);
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"config_hash\""));
        // identical reports serialize identically
        assert_eq!(json, rep.to_json().unwrap());
    }

    #[test]
    fn csv_render() {
        let mut t = CsvTable::new(&["n", "value"]);
        t.row(vec!["1".into(), CsvTable::num(0.5)]);
        let s = t.render();
        assert!(s.starts_with("n,value\n1,"));
        let v: f64 = s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.5);
    }
}
