//! Structured outcomes of law suites.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Every sampled instance had an undefined left-hand side, so the law held vacuously.
    UndefinedSum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub status: Status,
    pub samples: u64,
    pub vacuous: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub id: String,
    pub model: String,
    pub cases: Vec<CaseReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub suites: Vec<SuiteReport>,
}

impl SuiteReport {
    pub fn new(id: impl Into<String>, model: impl Into<String>) -> Self {
        SuiteReport { id: id.into(), model: model.into(), cases: Vec::new() }
    }

    pub fn push(&mut self, case: CaseReport) {
        self.cases.push(case);
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn case(&self, id: &str) -> Option<&CaseReport> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn push(&mut self, suite: SuiteReport) {
        self.suites.push(suite);
    }

    pub fn extend(&mut self, other: LawReport) {
        self.suites.extend(other.suites);
    }

    pub fn failures(&self) -> impl Iterator<Item = (&SuiteReport, &CaseReport)> {
        self.suites.iter().flat_map(|s| s.failures().map(move |c| (s, c)))
    }

    /// Structured form with timing zeroed, for byte-level reproducibility checks.
    pub fn without_timing(&self) -> LawReport {
        let mut r = self.clone();
        for s in &mut r.suites {
            for c in &mut s.cases {
                c.elapsed_ms = 0;
            }
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut undefined = Vec::new();
        for s in &self.suites {
            let pass = s.cases.iter().filter(|c| c.status == Status::Pass).count();
            let fail = s.cases.iter().filter(|c| c.status == Status::Fail).count();
            let undef = s.cases.iter().filter(|c| c.status == Status::UndefinedSum).count();
            let _ = writeln!(
                out,
                "{:<8} {:<20} model={:<6} pass={} fail={} undefined-sum={}",
                if fail == 0 { "PASS" } else { "FAIL" },
                s.id,
                s.model,
                pass,
                fail,
                undef
            );
            for c in s.failures() {
                let _ = writeln!(out, "  fail {}: {}", c.id, c.witness.as_deref().unwrap_or("-"));
            }
            for c in s.cases.iter().filter(|c| c.status == Status::UndefinedSum) {
                undefined.push(format!("{}/{}", s.id, c.id));
            }
        }
        if !undefined.is_empty() {
            let _ = writeln!(out, "undefined-sum cases:");
            for u in undefined {
                let _ = writeln!(out, "  {u}");
            }
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "pass" } else { "fail" });
        out
    }
}

/// Accumulates sample outcomes for one law.
pub struct Case {
    id: String,
    samples: u64,
    vacuous: u64,
    failed: bool,
    witness: Option<String>,
    note: Option<String>,
    start: Instant,
}

impl Case {
    pub fn new(id: impl Into<String>) -> Self {
        Case {
            id: id.into(),
            samples: 0,
            vacuous: 0,
            failed: false,
            witness: None,
            note: None,
            start: Instant::now(),
        }
    }

    /// Record one instance; the witness closure runs only on the first failure.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) -> bool {
        self.samples += 1;
        if !ok && !self.failed {
            self.failed = true;
            self.witness = Some(witness());
        }
        ok
    }

    /// Record an instance whose hypothesis was undefined.
    pub fn vacuous(&mut self) {
        self.samples += 1;
        self.vacuous += 1;
    }

    pub fn fail(&mut self, witness: impl Into<String>) {
        self.check(false, || witness.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn finish(self) -> CaseReport {
        let status = if self.failed {
            Status::Fail
        } else if self.samples > 0 && self.vacuous == self.samples {
            Status::UndefinedSum
        } else {
            Status::Pass
        };
        CaseReport {
            id: self.id,
            status,
            samples: self.samples,
            vacuous: self.vacuous,
            witness: self.witness,
            note: self.note,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_only_case_is_undefined_sum() {
        let mut c = Case::new("x");
        c.vacuous();
        c.vacuous();
        assert_eq!(c.finish().status, Status::UndefinedSum);
    }

    #[test]
    fn first_witness_is_kept() {
        let mut c = Case::new("x");
        c.check(true, || unreachable!());
        c.check(false, || "first".into());
        c.check(false, || "second".into());
        let r = c.finish();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witness.as_deref(), Some("first"));
        assert_eq!(r.samples, 3);
    }

    #[test]
    fn text_lists_undefined_separately() {
        let mut s = SuiteReport::new("demo", "pcoh");
        let mut c = Case::new("u");
        c.vacuous();
        s.push(c.finish());
        let mut r = LawReport::default();
        r.push(s);
        let t = r.render_text();
        assert!(t.contains("undefined-sum cases:"));
        assert!(t.contains("demo/u"));
        assert!(r.passed());
    }
}
