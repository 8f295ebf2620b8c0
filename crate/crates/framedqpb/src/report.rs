//! Check reports: a flat list of named checks with exact pass/fail status,
//! rendered as deterministic text or JSON. Reports carry no wall-clock data
//! so identical inputs produce byte-identical output.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// The identity degenerates to `0 = 0` in this model; both sides were
    /// still computed and compared.
    Vacuous,
    Unsupported,
    Unverified,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Vacuous => "VACUOUS",
            Status::Unsupported => "UNSUPPORTED",
            Status::Unverified => "UNVERIFIED",
        };
        write!(f, "{s}")
    }
}

/// One verified identity or computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub status: Status,
    /// Counterexample or context, present on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(id: &str, description: &str, status: Status) -> Self {
        Check {
            id: id.to_string(),
            description: description.to_string(),
            status,
            witness: None,
        }
    }

    pub fn pass(id: &str, description: &str) -> Self {
        Check::new(id, description, Status::Pass)
    }

    pub fn of_bool(id: &str, description: &str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(id, description)
        } else {
            Check::new(id, description, Status::Fail).with_witness(witness())
        }
    }

    pub fn with_witness(mut self, w: String) -> Self {
        self.witness = Some(w);
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub unsupported: usize,
    pub unverified: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, scenario: &str, seed: u64, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            vacuous: count(Status::Vacuous),
            unsupported: count(Status::Unsupported),
            unverified: count(Status::Unverified),
        };
        Report {
            command: command.to_string(),
            scenario: scenario.to_string(),
            seed,
            checks,
            summary,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\nscenario: {}\nseed: {}\n\n", self.command, self.scenario, self.seed));
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            out.push_str(&format!("{:<w$}  {:<11}  {}\n", c.id, c.status.to_string(), c.description, w = width));
            if let Some(wit) = &c.witness {
                out.push_str(&format!("{:<w$}  witness: {}\n", "", wit, w = width));
            }
        }
        out.push_str(&format!(
            "\n{} pass, {} fail, {} vacuous, {} unsupported, {} unverified\n",
            self.summary.pass, self.summary.fail, self.summary.vacuous, self.summary.unsupported, self.summary.unverified
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new("verify", "none", 0, vec![]);
        assert!(!r.has_failures());
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["summary"]["pass"], 0);
    }

    #[test]
    fn failure_carries_witness_and_statuses_render_distinctly() {
        let checks = vec![
            Check::of_bool("a", "always fails", false, || "defect = 1".into()),
            Check::new("b", "degenerate", Status::Vacuous),
        ];
        let r = Report::new("verify", "none", 1, checks);
        assert!(r.has_failures());
        let json = r.to_json();
        assert!(json.contains("defect = 1"));
        assert!(json.contains("VACUOUS"));
        assert!(json.contains("FAIL"));
        let text = r.to_text();
        assert!(text.contains("witness: defect = 1"));
    }

    #[test]
    fn checks_sorted_by_id() {
        let r = Report::new(
            "verify",
            "none",
            0,
            vec![Check::pass("z", ""), Check::pass("a", "")],
        );
        assert_eq!(r.checks[0].id, "a");
    }
}
