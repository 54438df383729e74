use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever a field is renamed, removed, or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Exploratory outcome: recorded, does not fail the run.
    Finding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    /// Everything needed to rerun the case in explicit mode.
    pub parameters: Value,
    pub status: Status,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub runtime_ms: f64,
}

/// Conventions fixed by the toolkit, recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub q_restoration: String,
    pub powered_q: String,
    pub h_convention: String,
    pub uniformizer: String,
    pub sqrt_hbar_branch: String,
    pub product_order: String,
    pub pencil_factor: String,
    pub connection: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub seed: u64,
    /// The effective configuration after defaults were applied.
    pub config: Value,
    pub status: Status,
    pub cases: Vec<CaseRecord>,
    pub budget_ms: u64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub conventions: Conventions,
    pub status: Status,
    pub checks: Vec<CheckReport>,
}

/// `fail` if any case failed, else `finding` if any case is a finding.
pub fn aggregate(statuses: impl IntoIterator<Item = Status>) -> Status {
    statuses.into_iter().fold(Status::Pass, |acc, s| match (acc, s) {
        (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
        (Status::Finding, _) | (_, Status::Finding) => Status::Finding,
        _ => Status::Pass,
    })
}

/// Removes every `runtime_ms` field, leaving the deterministic content.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation() {
        assert_eq!(aggregate([]), Status::Pass);
        assert_eq!(aggregate([Status::Pass, Status::Finding]), Status::Finding);
        assert_eq!(aggregate([Status::Finding, Status::Fail, Status::Pass]), Status::Fail);
    }

    #[test]
    fn timing_stripped_recursively() {
        let mut v = serde_json::json!({"runtime_ms": 3.0, "cases": [{"runtime_ms": 1.0, "x": 2}]});
        strip_timing(&mut v);
        assert_eq!(v, serde_json::json!({"cases": [{"x": 2}]}));
    }
}
