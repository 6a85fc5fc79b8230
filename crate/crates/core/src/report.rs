//! Machine-readable run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::oracle::Solution;

/// Writes a float with 17 significant digits.
fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{x:.16e}"))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionEntry {
    pub cols: Solution,
    #[serde(serialize_with = "sig17")]
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitStats {
    pub qubits: usize,
    pub clbits: usize,
    pub gate_histogram: BTreeMap<String, usize>,
    pub depth: usize,
    pub branches_explored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub n: usize,
    pub algorithm: String,
    pub mode: String,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub solutions: Vec<SolutionEntry>,
    #[serde(serialize_with = "sig17")]
    pub success_probability: f64,
    pub oracle_count: usize,
    pub oracle_match: bool,
    pub circuit: CircuitStats,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Re-derives `oracle_match` from `oracle` and checks the probability sum.
    pub fn is_consistent(&self, oracle: &[Solution]) -> bool {
        let listed: Vec<&Solution> = self.solutions.iter().map(|s| &s.cols).collect();
        let matches = listed.len() == oracle.len() && oracle.iter().all(|o| listed.contains(&o));
        let total: f64 = self.solutions.iter().map(|s| s.probability).sum();
        matches == self.oracle_match && (total - self.success_probability).abs() <= 1e-9
    }
}
