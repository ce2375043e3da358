//! Check records, stage reports and the run report written to disk.

use crate::error::Result;
use serde_json::{json, Value};
use std::path::Path;

/// A JSON number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// One numeric or boolean claim, with the operation that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub value: Value,
    pub tol: Option<f64>,
    /// "<=", ">=", ">", "==" or "holds"
    pub cmp: &'static str,
    pub op: String,
}

impl CheckRecord {
    pub fn holds(name: &str, op: &str, pass: bool) -> Self {
        CheckRecord { name: name.into(), pass, value: json!(pass), tol: None, cmp: "holds", op: op.into() }
    }

    pub fn le(name: &str, op: &str, value: f64, tol: f64) -> Self {
        CheckRecord { name: name.into(), pass: value <= tol, value: num(value), tol: Some(tol), cmp: "<=", op: op.into() }
    }

    pub fn ge(name: &str, op: &str, value: f64, tol: f64) -> Self {
        CheckRecord { name: name.into(), pass: value >= tol, value: num(value), tol: Some(tol), cmp: ">=", op: op.into() }
    }

    pub fn gt(name: &str, op: &str, value: f64, bound: f64) -> Self {
        CheckRecord { name: name.into(), pass: value > bound, value: num(value), tol: Some(bound), cmp: ">", op: op.into() }
    }

    /// Exact equality of two rendered values.
    pub fn equal(name: &str, op: &str, found: Value, expected: Value) -> Self {
        let pass = found == expected;
        CheckRecord { name: name.into(), pass, value: json!({"found": found, "expected": expected}), tol: None, cmp: "==", op: op.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "pass": self.pass, "value": self.value, "tol": self.tol.map(num), "cmp": self.cmp, "op": self.op})
    }
}

#[derive(Clone, Debug, Default)]
pub struct StageReport {
    pub stage: String,
    pub checks: Vec<CheckRecord>,
    pub data: Value,
    pub error: Option<String>,
    pub skipped: Option<String>,
    /// (file name, contents)
    pub csv: Vec<(String, String)>,
    pub seconds: f64,
}

impl StageReport {
    pub fn new(stage: &str) -> Self {
        StageReport { stage: stage.into(), data: json!({}), ..Default::default() }
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// The failing checks and the error, on one line.
    pub fn summary_line(&self) -> String {
        let f: Vec<String> = self.failures().iter().map(|c| format!("{} = {}", c.name, c.value)).collect();
        format!("{}: error={:?} failed=[{}] data={}", self.stage, self.error, f.join("; "), self.data)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "stage": self.stage,
            "pass": self.pass(),
            "checks": self.checks.iter().map(CheckRecord::to_json).collect::<Vec<_>>(),
            "data": self.data,
            "error": self.error,
            "skipped": self.skipped,
            "csv": self.csv.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub example: String,
    pub config: Value,
    pub stages: Vec<StageReport>,
}

impl RunReport {
    pub fn pass(&self) -> bool {
        self.stages.iter().all(StageReport::pass)
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == name)
    }

    /// Timings are left out so that equal inputs give byte-identical reports.
    pub fn to_json(&self) -> Value {
        json!({
            "example": self.example,
            "config": self.config,
            "pass": self.pass(),
            "checks": self.stages.iter().map(|s| s.checks.len()).sum::<usize>(),
            "stages": self.stages.iter().map(StageReport::to_json).collect::<Vec<_>>(),
        })
    }

    /// report.json plus the CSV files, all under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        std::fs::write(dir.join("report.json"), text)?;
        for s in &self.stages {
            for (name, body) in &s.csv {
                std::fs::write(dir.join(name), body)?;
            }
        }
        Ok(())
    }

    /// One line per stage, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.stages {
            let status = if s.skipped.is_some() {
                "skip"
            } else if s.pass() {
                "pass"
            } else {
                "FAIL"
            };
            let passed = s.checks.iter().filter(|c| c.pass).count();
            out.push_str(&format!("{:<11} {status}  {passed}/{} checks  {:.2}s\n", s.stage, s.checks.len(), s.seconds));
            if let Some(e) = &s.error {
                out.push_str(&format!("  error: {e}\n"));
            }
            for c in s.failures() {
                out.push_str(&format!("  failed: {} ({}) value={} tol={:?}\n", c.name, c.op, c.value, c.tol));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_are_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
    }

    #[test]
    fn stage_with_error_fails() {
        let mut s = StageReport::new("x");
        s.push(CheckRecord::le("a", "op", 1.0, 2.0));
        assert!(s.pass());
        s.error = Some("boom".into());
        assert!(!s.pass());
    }

    #[test]
    fn comparisons() {
        assert!(!CheckRecord::le("a", "op", f64::NAN, 1.0).pass);
        assert!(CheckRecord::ge("a", "op", 3.0, 1.0).pass);
        assert!(!CheckRecord::equal("a", "op", json!([1]), json!([2])).pass);
    }
}
