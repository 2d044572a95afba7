//! Run reports and their files: `<name>.report.json` and `<name>.csv`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hspot::VerificationReport;
use serde::Serialize;
use serde_json::Value;

use crate::format::sig15;
use crate::{CliError, CliResult, VERSION};

pub const CHECK_HEADER: &str = "check,lhs,rhs,abs_err,rel_err,pass";
pub const RATIO_HEADER: &str = "R,ratio";
pub const OUT_ENV: &str = "HSPOT_OUT";
pub const DEFAULT_OUT: &str = "hspot-out";

/// `--out` first, then `HSPOT_OUT`, then `./hspot-out`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: &'static str,
    pub pass: bool,
    pub wall_time_s: f64,
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, Value>,
}

impl RunReport {
    pub fn new(scenario: impl Into<String>, checks: Vec<VerificationReport>, config: BTreeMap<String, Value>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { scenario: scenario.into(), version: VERSION, pass, wall_time_s: 0.0, config, checks, summary: BTreeMap::new() }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            crate::EXIT_PASS
        } else {
            crate::EXIT_FAIL
        }
    }

    pub fn json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One line per check, then a verdict line.
    pub fn text_summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "{mark} {}  lhs={} rhs={} abs_err={}", c.check, sig15(c.lhs), sig15(c.rhs), sig15(c.abs_err));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k}: {v}");
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(s, "{}: {} checks, {failed} failed", self.scenario, self.checks.len());
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn checks_csv(checks: &[VerificationReport]) -> String {
    let mut s = String::from(CHECK_HEADER);
    s.push('\n');
    for c in checks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            csv_field(&c.check),
            sig15(c.lhs),
            sig15(c.rhs),
            sig15(c.abs_err),
            sig15(c.rel_err),
            c.pass
        );
    }
    s
}

pub fn ratio_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from(RATIO_HEADER);
    s.push('\n');
    for (r, v) in rows {
        let _ = writeln!(s, "{},{}", sig15(*r), sig15(*v));
    }
    s
}

fn write(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes `<name>.report.json` and `<name>.csv` into `dir`, creating it when needed.
pub fn persist(dir: &Path, report: &RunReport, csv: &str) -> CliResult<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let json_path = dir.join(format!("{}.report.json", report.scenario));
    let csv_path = dir.join(format!("{}.csv", report.scenario));
    write(&json_path, &report.json()?)?;
    write(&csv_path, csv)?;
    Ok((json_path, csv_path))
}
