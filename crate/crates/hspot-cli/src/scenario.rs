//! Scenario files: `key = value` lines, `#` comments and `[section]` headers.
//!
//! ```text
//! name = abs-power
//! operation = growth
//! seed = 7
//!
//! [parameters]
//! m = 1
//! alpha = 1
//!
//! [quadrature]
//! abs_tol = 1e-9
//! ```
//!
//! Top-level keys are `name`, `operation` and `seed`. The `quadrature` section takes
//! `abs_tol`, `rel_tol`, `max_depth` and `truncation_radius`. Everything under `parameters`
//! belongs to the operation.

use std::collections::BTreeMap;
use std::path::Path;

use hspot::quadrature::QuadratureSpec;

use crate::{CliError, CliResult};

pub const OPERATIONS: [&str; 3] = ["growth", "growth-p", "lower-bound"];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub operation: String,
    pub parameters: BTreeMap<String, String>,
    pub quadrature: BTreeMap<String, String>,
    pub seed: u64,
}

#[derive(PartialEq)]
enum Section {
    Top,
    Parameters,
    Quadrature,
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Scenario { line, message: message.into() }
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let mut s = Self::parse(&text)?;
        if s.name.is_empty() {
            s.name = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(s)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut section = Section::Top;
        let mut name = String::new();
        let mut operation = None;
        let mut seed = 0;
        let mut parameters = BTreeMap::new();
        let mut quadrature = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(head) = line.strip_prefix('[') {
                let head = head.strip_suffix(']').ok_or_else(|| parse_err(line_no, "unterminated section header"))?;
                section = match head.trim() {
                    "parameters" => Section::Parameters,
                    "quadrature" => Section::Quadrature,
                    other => return Err(parse_err(line_no, format!("unknown section '{other}'"))),
                };
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err(line_no, "expected 'key = value'"))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key.is_empty() {
                return Err(parse_err(line_no, "empty key"));
            }
            match section {
                Section::Top => match key.as_str() {
                    "name" => name = value,
                    "operation" => {
                        if !OPERATIONS.contains(&value.as_str()) {
                            return Err(parse_err(line_no, format!("unknown operation '{value}'")));
                        }
                        operation = Some(value);
                    }
                    "seed" => seed = value.parse().map_err(|_| parse_err(line_no, format!("bad seed '{value}'")))?,
                    _ => return Err(parse_err(line_no, format!("unknown top-level key '{key}'"))),
                },
                Section::Parameters => {
                    if parameters.insert(key.clone(), value).is_some() {
                        return Err(parse_err(line_no, format!("duplicate key '{key}'")));
                    }
                }
                Section::Quadrature => {
                    if !["abs_tol", "rel_tol", "max_depth", "truncation_radius"].contains(&key.as_str()) {
                        return Err(parse_err(line_no, format!("unknown quadrature key '{key}'")));
                    }
                    if quadrature.insert(key.clone(), value).is_some() {
                        return Err(parse_err(line_no, format!("duplicate key '{key}'")));
                    }
                }
            }
        }
        let operation = operation.ok_or_else(|| parse_err(0, "missing 'operation'"))?;
        Ok(Self { name, operation, parameters, quadrature, seed })
    }

    /// Fails on parameter keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        for k in self.parameters.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::usage(format!("operation '{}' takes no parameter '{k}'", self.operation)));
            }
        }
        Ok(())
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        self.text(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    pub fn f64_req(&self, key: &str) -> CliResult<f64> {
        let v = self.text(key).ok_or_else(|| CliError::usage(format!("missing parameter '{key}'")))?;
        parse_f64(key, v)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        self.text(key)
            .map_or(Ok(default), |v| v.parse().map_err(|_| CliError::usage(format!("'{key}' needs an integer, got '{v}'"))))
    }

    pub fn list_or(&self, key: &str, default: Vec<f64>) -> CliResult<Vec<f64>> {
        self.text(key).map_or(Ok(default), |v| parse_list(key, v))
    }

    /// `QuadratureSpec` with the section's overrides applied to `base`.
    pub fn quadrature_spec(&self, base: QuadratureSpec) -> CliResult<QuadratureSpec> {
        let mut q = base;
        for (k, v) in &self.quadrature {
            match k.as_str() {
                "abs_tol" => q.abs_tol = parse_f64(k, v)?,
                "rel_tol" => q.rel_tol = parse_f64(k, v)?,
                "max_depth" => q.max_depth = v.parse().map_err(|_| CliError::usage(format!("bad max_depth '{v}'")))?,
                "truncation_radius" => q.truncation_radius = Some(parse_f64(k, v)?),
                _ => unreachable!("keys are checked while parsing"),
            }
        }
        q.validate()?;
        Ok(q)
    }
}

pub fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = match v.trim() {
        "pi" => std::f64::consts::PI,
        "pi/2" => std::f64::consts::FRAC_PI_2,
        "pi/3" => std::f64::consts::FRAC_PI_3,
        "pi/4" => std::f64::consts::FRAC_PI_4,
        s => s.parse().map_err(|_| CliError::usage(format!("'{key}' needs a number, got '{v}'")))?,
    };
    if !x.is_finite() {
        return Err(CliError::usage(format!("'{key}' must be finite")));
    }
    Ok(x)
}

/// Comma-separated numbers.
pub fn parse_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

/// Atoms as `;`-separated groups of comma-separated numbers, the mass last:
/// `x,y,mass; x,y,mass`.
pub fn parse_atoms(key: &str, v: &str, dim: usize) -> CliResult<Vec<(Vec<f64>, f64)>> {
    let mut out = Vec::new();
    for group in v.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let nums = parse_list(key, group)?;
        if nums.len() != dim + 1 {
            return Err(CliError::usage(format!("'{key}': atom '{group}' needs {dim} coordinates and a mass")));
        }
        let mass = nums[dim];
        out.push((nums[..dim].to_vec(), mass));
    }
    Ok(out)
}
