use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::LabError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub module: String,
    pub operation: String,
    pub status: Status,
    /// Absent only when the case errored or was skipped.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default)]
    pub artifacts: Vec<String>,
    #[serde(default)]
    pub data: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentRecord {
    pub n: usize,
    pub kmax: usize,
    pub groups: Vec<String>,
    pub version: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

/// Wall-clock data; the only part of a report that may differ between
/// two runs of the same configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timing {
    pub generated_unix: u64,
    pub total_seconds: f64,
    pub case_seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub environment: EnvironmentRecord,
    pub filter: String,
    pub summary: Summary,
    pub cases: Vec<CaseRecord>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(environment: EnvironmentRecord, filter: String, mut cases: Vec<CaseRecord>, timing: Timing) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &cases {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
            }
        }
        Self { schema_version: SCHEMA_VERSION, environment, filter, summary, cases, timing }
    }

    /// Zero iff no case failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.fail > 0)
    }

    pub fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.id == id)
    }

    /// The report with the timing block cleared, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self { timing: Timing::default(), ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| LabError::Io { path: path.display().to_string(), source: e })
    }

    pub fn read(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io { path: path.display().to_string(), source: e })?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, status: Status) -> CaseRecord {
        CaseRecord {
            id: id.into(),
            module: "m".into(),
            operation: "o".into(),
            status,
            measured: Some(0.0),
            tolerance: 1.0,
            seed: 0,
            message: None,
            artifacts: vec![],
            data: Value::Null,
        }
    }

    fn env() -> EnvironmentRecord {
        EnvironmentRecord { n: 8, kmax: 1, groups: vec!["su2".into()], version: "0".into() }
    }

    #[test]
    fn cases_are_ordered_and_counted() {
        let r = RunReport::new(env(), String::new(), vec![rec("b", Status::Fail), rec("a", Status::Pass), rec("c", Status::Skip)], Timing::default());
        assert_eq!(r.cases.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(r.summary, Summary { pass: 1, fail: 1, skip: 1 });
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_json().unwrap().contains("\"schema_version\": 1"));
    }

    #[test]
    fn skips_do_not_fail_the_run() {
        let r = RunReport::new(env(), String::new(), vec![rec("a", Status::Skip), rec("b", Status::Pass)], Timing::default());
        assert_eq!(r.exit_code(), 0);
    }
}
