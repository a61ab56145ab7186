//! Structured verification reports.
//!
//! A report is a list of check records plus a config echo; serialization is
//! canonical (sorted object keys, exact rationals as `p/q` strings), so the
//! same configuration and seed always produce byte-identical output.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Provisional,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    /// Dimensions, counts or other scalar outcomes, keyed for determinism.
    pub data: BTreeMap<String, String>,
    /// Re-runnable witness in text syntax, present on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(id: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            status: Status::Pass,
            data: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn fail(id: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            status: Status::Fail,
            data: BTreeMap::new(),
            witness: Some(witness.into()),
        }
    }

    pub fn provisional(id: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            status: Status::Provisional,
            data: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.data.insert(key.into(), value.to_string());
        self
    }

    pub fn assert(id: impl Into<String>, ok: bool, witness: impl Into<String>) -> Self {
        if ok {
            CheckRecord::pass(id)
        } else {
            CheckRecord::fail(id, witness)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    /// Echo of the invocation, sorted by key.
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub provisional: usize,
}

impl Report {
    pub fn new(config: BTreeMap<String, String>, checks: Vec<CheckRecord>) -> Self {
        let summary = Summary {
            pass: checks.iter().filter(|c| c.status == Status::Pass).count(),
            fail: checks.iter().filter(|c| c.status == Status::Fail).count(),
            provisional: checks
                .iter()
                .filter(|c| c.status == Status::Provisional)
                .count(),
        };
        Report {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// Canonical JSON: `serde_json` with its default `BTreeMap`-backed
    /// objects keeps keys sorted.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema {} tool {}\n", self.schema, self.tool_version));
        for (k, v) in &self.config {
            out.push_str(&format!("config {} = {}\n", k, v));
        }
        for c in &self.checks {
            let st = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Provisional => "provisional",
            };
            out.push_str(&format!("[{}] {}", st, c.id));
            for (k, v) in &c.data {
                out.push_str(&format!("  {}={}", k, v));
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                out.push_str(&format!("    witness: {}\n", w));
            }
        }
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} provisional\n",
            self.summary.pass, self.summary.fail, self.summary.provisional
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_deterministic_and_sorted() {
        let mut cfg = BTreeMap::new();
        cfg.insert("zeta".to_string(), "1".to_string());
        cfg.insert("alpha".to_string(), "2".to_string());
        let r1 = Report::new(
            cfg.clone(),
            vec![CheckRecord::pass("a").with("dim", 3), CheckRecord::fail("b", "x + 1")],
        );
        let r2 = Report::new(
            cfg,
            vec![CheckRecord::pass("a").with("dim", 3), CheckRecord::fail("b", "x + 1")],
        );
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(!r1.all_passed());
        let j = r1.to_json();
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
    }
}
