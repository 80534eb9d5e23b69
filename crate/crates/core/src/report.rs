use std::fmt;

use serde::Serialize;

/// One failed axiom together with the ids that witness the failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witnesses: Vec<String>,
}

/// Outcome of an axiom check. `ok` holds exactly when `violations` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport {
            ok: true,
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, axiom: impl Into<String>, witnesses: Vec<String>) {
        self.ok = false;
        self.violations.push(Violation {
            axiom: axiom.into(),
            witnesses,
        });
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        for v in other.violations {
            self.push(v.axiom, v.witnesses);
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("({}) at {}", v.axiom, v.witnesses.join(",")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}
