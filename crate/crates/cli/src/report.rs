use std::collections::BTreeMap;

use serde::Serialize;

use hamq_core::io::emit_graph6;
use hamq_core::Graph;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    /// graph6 of the offending graph, empty for purely arithmetic cases.
    pub graph6: String,
    pub case: String,
    pub violation: String,
}

/// Outcome of one verification suite. Deterministic for fixed parameters:
/// failures are sorted and wall time is not part of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parameters: BTreeMap<String, String>,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            parameters: BTreeMap::new(),
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn absorb(&mut self, outcome: CaseOutcome) {
        self.cases += 1;
        self.failures.extend(outcome.failures);
    }

    pub fn finish(mut self) -> Self {
        self.failures.sort();
        self
    }
}

/// Failures from one case, accumulated in parallel and merged afterwards.
#[derive(Debug, Default)]
pub struct CaseOutcome {
    pub failures: Vec<Failure>,
}

impl CaseOutcome {
    pub fn check(&mut self, ok: bool, g: Option<&Graph>, case: impl Into<String>, violation: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(Failure {
                graph6: g.map(emit_graph6).unwrap_or_default(),
                case: case.into(),
                violation: violation(),
            });
        }
    }
}
