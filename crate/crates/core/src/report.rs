//! Verification reports: one entry per checked identity.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub identity: String,
    pub anchor: String,
    pub passed: bool,
    /// Location and values of the first offending coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(identity: &str, anchor: &str, first_failure: Option<String>) -> Self {
        let mut r = Self::new();
        r.push(identity, anchor, first_failure);
        r
    }

    pub fn push(&mut self, identity: &str, anchor: &str, first_failure: Option<String>) {
        self.checks.push(CheckOutcome {
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            passed: first_failure.is_none(),
            first_failure,
        });
    }

    pub fn merge(mut self, other: Report) -> Report {
        self.checks.extend(other.checks);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {}  [{}]\n", c.identity, c.anchor));
            if let Some(f) = &c.first_failure {
                out.push_str(&format!("      first failure: {f}\n"));
            }
        }
        out
    }
}
