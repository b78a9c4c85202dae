//! Check reports, rendered as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::check::Violation;
use crate::graded::GradedBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// The first violation found by a check, with names in place of indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub scope: BTreeMap<String, i64>,
    pub tuple: Vec<String>,
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub scope: BTreeMap<String, i64>,
    pub verdict: Verdict,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn from_violations(
        name: &str,
        scope: &[(&str, i64)],
        found: &[Violation],
        basis: &GradedBasis,
    ) -> Self {
        let witness = found.first().map(|v| Witness {
            scope: v.scope.iter().cloned().collect(),
            tuple: v.tuple.iter().map(|&i| basis.name(i).to_string()).collect(),
            residual: v.residual.render(basis),
        });
        CheckReport {
            name: name.to_string(),
            scope: scope.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            verdict: if found.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            violations: found.len(),
            witness,
            note: None,
        }
    }

    /// A failed check whose witness is not a basis tuple.
    pub fn failed(name: &str, scope: &[(&str, i64)], note: String) -> Self {
        CheckReport {
            name: name.to_string(),
            scope: scope.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            verdict: Verdict::Fail,
            violations: 1,
            witness: None,
            note: Some(note),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub checks: Vec<CheckReport>,
    pub timing_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn render_scope(scope: &BTreeMap<String, i64>) -> String {
    scope.iter().map(|(k, v)| format!(" {k}={v}")).collect()
}

impl Report {
    pub fn new(
        command: &str,
        checks: Vec<CheckReport>,
        timing_ms: u64,
        output: Option<String>,
    ) -> Self {
        let verdict = if checks.iter().all(CheckReport::passes) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Report {
            command: command.to_string(),
            verdict,
            checks,
            timing_ms,
            output,
        }
    }

    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for c in &self.checks {
            let _ = write!(
                s,
                "check {}{}: {}",
                c.name,
                render_scope(&c.scope),
                c.verdict.as_str()
            );
            if c.violations > 0 {
                let _ = write!(s, " (violations: {})", c.violations);
            }
            s.push('\n');
            if let Some(w) = &c.witness {
                let _ = writeln!(
                    s,
                    "  witness{}: ({}) -> {}",
                    render_scope(&w.scope),
                    w.tuple.join(" "),
                    w.residual
                );
            }
            if let Some(n) = &c.note {
                let _ = writeln!(s, "  note: {n}");
            }
        }
        if let Some(out) = &self.output {
            s.push_str("output:\n");
            s.push_str(out);
            if !out.ends_with('\n') {
                s.push('\n');
            }
        }
        let _ = writeln!(s, "verdict: {}", self.verdict.as_str());
        let _ = writeln!(s, "timing_ms: {}", self.timing_ms);
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
