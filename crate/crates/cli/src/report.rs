//! JSON report and CSV tables, written atomically into the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub branch: String,
    pub index: usize,
    pub lambda2: f64,
    pub eff_mass: f64,
    pub eigen_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    pub lambda2: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub residuals: BTreeMap<String, f64>,
    pub quantities: BTreeMap<String, serde_json::Value>,
    pub spectrum: Vec<SpectrumRow>,
    pub levels: Vec<LevelRow>,
    pub convergence: Vec<ConvergenceRow>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            branch: None,
            status: "pass".into(),
            exit_code: 0,
            message: None,
            residuals: BTreeMap::new(),
            quantities: BTreeMap::new(),
            spectrum: Vec::new(),
            levels: Vec::new(),
            convergence: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    pub fn quantity(&mut self, name: &str, value: impl Into<serde_json::Value>) {
        self.quantities.insert(name.to_string(), value.into());
    }
}

/// 17 significant digits, round-trip safe.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut s = String::from("branch,index,lambda2,eff_mass,eigen_residual\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.branch,
            r.index,
            fmt_num(r.lambda2),
            fmt_num(r.eff_mass),
            fmt_num(r.eigen_residual)
        ));
    }
    s
}

/// Write `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    let target = dir.join(name);
    let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
    f.write_all(contents).with_context(|| format!("cannot write {}", tmp.display()))?;
    f.sync_all().ok();
    fs::rename(&tmp, &target).with_context(|| format!("cannot move report into place at {}", target.display()))?;
    Ok(())
}

pub fn write_report(dir: &Path, report: &Report) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).context("cannot serialise report")?;
    json.push('\n');
    write_atomic(dir, "report.json", json.as_bytes())
}
