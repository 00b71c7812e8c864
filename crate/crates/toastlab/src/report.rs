use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named check with an optional witness describing the first violation
/// (or auxiliary data such as ratios and exemption counts).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// Verifier output: a list of checks. Verifiers never fail; they report.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report { checks: Vec::new() }
    }

    pub fn push(&mut self, name: &str, pass: bool, witness: Option<Value>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            witness,
        });
    }

    /// True when every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
