use serde::Serialize;

/// Outcome of a verification sweep: how many cases were examined and a
/// description of every case that failed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), cases: 0, failures: Vec::new() }
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
    }
}
