//! Report data model with a stable JSON schema:
//! `{meta: {seed, config_hash, version}, results: [{ensemble, N,
//! replicas, moments: [{k, mean, stderr}], ks: {law, mean, stderr},
//! op_norm: {mean, min, max}, second_norm: {mean, stderr},
//! wall_clock_s}]}`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentStat {
    pub k: u32,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsStat {
    pub law: String,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStat {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    /// Cell label (which ensemble of the sweep this row belongs to).
    pub ensemble: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub replicas: usize,
    pub moments: Vec<MomentStat>,
    pub ks: Option<KsStat>,
    pub op_norm: NormStat,
    pub second_norm: MeanStat,
    /// Timing metadata; excluded from determinism comparisons.
    pub wall_clock_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub meta: Meta,
    pub results: Vec<SizeResult>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::Result<RunReport> {
        serde_json::from_str(text)
            .map_err(|e| crate::Error::Config(format!("malformed report JSON: {e}")))
    }

    /// Find the result row for a `(cell label, N)` pair.
    pub fn result(&self, ensemble: &str, n: usize) -> Option<&SizeResult> {
        self.results
            .iter()
            .find(|r| r.ensemble == ensemble && r.n == n)
    }
}

impl SizeResult {
    pub fn moment(&self, k: u32) -> Option<&MomentStat> {
        self.moments.iter().find(|m| m.k == k)
    }
}
