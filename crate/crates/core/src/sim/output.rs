use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{SweepConfig, SweepResult};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub code_id: String,
    pub model: String,
    pub p_m: f64,
    pub p_q: f64,
    pub pr_logical: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub truncation_tail: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumRow {
    pub code_id: String,
    pub w_q: usize,
    pub w_m: usize,
    pub trials: u64,
    pub failures: u64,
    pub p_l: f64,
    pub exact_flag: bool,
}

impl SweepResult {
    pub fn result_rows(&self) -> Vec<ResultRow> {
        self.codes
            .iter()
            .flat_map(|c| {
                c.points.iter().map(move |(noise, e)| ResultRow {
                    code_id: c.code_id.clone(),
                    model: noise.kind.label().to_string(),
                    p_m: noise.p_m,
                    p_q: noise.p_q(),
                    pr_logical: e.pr,
                    ci_low: e.ci_low,
                    ci_high: e.ci_high,
                    truncation_tail: e.tail,
                })
            })
            .collect()
    }

    pub fn stratum_rows(&self) -> Vec<StratumRow> {
        self.codes
            .iter()
            .flat_map(|c| {
                c.table.strata.values().map(move |s| StratumRow {
                    code_id: c.code_id.clone(),
                    w_q: s.w_q,
                    w_m: s.w_m,
                    trials: s.trials,
                    failures: s.failures,
                    p_l: s.p_l(),
                    exact_flag: s.exact,
                })
            })
            .collect()
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_results_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_rows(&result.result_rows(), file)
}

pub fn write_strata_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_rows(&result.stratum_rows(), file)
}

/// Reproduction record for a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    /// (code id, SHA-256 of its generator text).
    pub codes: Vec<(String, String)>,
    /// SHA-256 of the result CSV contents.
    pub results_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Manifest for `result`; `codes` pairs each code id with its generator text.
pub fn manifest_json(result: &SweepResult, codes: &[(String, String)]) -> Result<RunManifest> {
    let mut buf = Vec::new();
    write_rows(&result.result_rows(), &mut buf)?;
    Ok(RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: result.config.clone(),
        codes: codes
            .iter()
            .map(|(id, text)| (id.clone(), sha256_hex(text.as_bytes())))
            .collect(),
        results_sha256: sha256_hex(&buf),
    })
}
