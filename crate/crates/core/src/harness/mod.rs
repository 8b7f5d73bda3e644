//! Verification suites and their reports.

pub mod charspec;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

pub use charspec::{parse_char, parse_galois};
pub use suites::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unreliable,
}

/// One checked case: both sides as text and the precision the comparison was made at.
#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub key: String,
    pub verdict: Verdict,
    pub computed: String,
    pub expected: String,
    /// "exact" or "(p^M, T^N)"
    pub precision: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    pub fn new(key: impl Into<String>, ok: bool, computed: impl fmt::Display, expected: impl fmt::Display, precision: impl Into<String>) -> Self {
        Case {
            key: key.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            computed: computed.to_string(),
            expected: expected.to_string(),
            precision: precision.into(),
            level: None,
            note: None,
        }
    }

    pub fn unreliable(key: impl Into<String>, why: impl Into<String>, precision: impl Into<String>) -> Self {
        Case {
            key: key.into(),
            verdict: Verdict::Unreliable,
            computed: String::new(),
            expected: String::new(),
            precision: precision.into(),
            level: None,
            note: Some(why.into()),
        }
    }

    pub fn at_level(mut self, k: u32) -> Self {
        self.level = Some(k);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub fn exact() -> String {
    "exact".to_string()
}

pub fn prec_label(p: u64, m: u32, n: Option<usize>) -> String {
    match n {
        Some(n) => format!("({}^{}, T^{})", p, m, n),
        None => format!("{}^{}", p, m),
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: Value,
    pub cases: Vec<Case>,
    /// skipped inputs by reason
    pub skipped: BTreeMap<String, u64>,
    pub duration: Duration,
}

impl ScenarioReport {
    pub fn new(scenario: &str, params: Value) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            params,
            cases: Vec::new(),
            skipped: BTreeMap::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn push(&mut self, c: Case) {
        self.cases.push(c);
    }

    pub fn skip(&mut self, reason: &str) {
        *self.skipped.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.cases.iter().filter(|c| c.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.verdict == Verdict::Pass)
    }

    /// 0 all pass, 1 a failure, 3 no failure but some case ran out of precision.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Fail) > 0 {
            1
        } else if self.count(Verdict::Unreliable) > 0 {
            3
        } else {
            0
        }
    }

    pub fn sorted_cases(&self) -> Vec<&Case> {
        let mut v: Vec<&Case> = self.cases.iter().collect();
        v.sort_by(|a, b| a.key.cmp(&b.key));
        v
    }

    /// Deterministic: cases sorted by key, no timing unless asked for.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let mut v = json!({
            "scenario": self.scenario,
            "params": self.params,
            "cases": self.sorted_cases(),
            "skipped": self.skipped,
            "summary": {
                "pass": self.count(Verdict::Pass),
                "fail": self.count(Verdict::Fail),
                "unreliable": self.count(Verdict::Unreliable),
            },
        });
        if with_timing {
            v["duration_ms"] = json!(self.duration.as_millis() as u64);
        }
        v
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} {}", self.scenario, self.params)?;
        for c in self.sorted_cases() {
            let v = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Unreliable => "UNRELIABLE",
            };
            write!(f, "{:<10} {} [{}", v, c.key, c.precision)?;
            if let Some(k) = c.level {
                write!(f, ", level {}", k)?;
            }
            write!(f, "]")?;
            if c.verdict != Verdict::Pass || c.computed.len() < 40 {
                write!(f, " computed={} expected={}", c.computed, c.expected)?;
            }
            if let Some(n) = &c.note {
                write!(f, " ({})", n)?;
            }
            writeln!(f)?;
        }
        for (r, n) in &self.skipped {
            writeln!(f, "skipped {}: {}", r, n)?;
        }
        write!(
            f,
            "{} pass, {} fail, {} unreliable in {:.1}s",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Unreliable),
            self.duration.as_secs_f64()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_byte_identical() {
        let a = run_compat_suite(&[1, 4], &[3, 5], 2, 20).unwrap();
        let b = run_compat_suite(&[1, 4], &[3, 5], 2, 20).unwrap();
        assert!(a.passed());
        assert_eq!(a.to_json(false).to_string(), b.to_json(false).to_string());
        assert!(a.to_json(false).get("duration_ms").is_none());
        assert!(a.to_json(true).get("duration_ms").is_some());
    }

    #[test]
    fn order_of_inputs_does_not_matter() {
        let a = run_interpolation_suite(&[3, 5], 8, 2, 3).unwrap();
        let b = run_interpolation_suite(&[5, 3], 8, 2, 3).unwrap();
        assert_eq!(a.to_json(false)["cases"], b.to_json(false)["cases"]);
        assert_eq!(a.skipped, b.skipped);
    }

    #[test]
    fn exit_codes() {
        let mut r = ScenarioReport::new("t", Value::Null);
        assert_eq!(r.exit_code(), 0);
        r.push(Case::unreliable("a", "short", exact()));
        assert_eq!(r.exit_code(), 3);
        r.push(Case::new("b", false, 1, 2, exact()));
        assert_eq!(r.exit_code(), 1);
    }
}
