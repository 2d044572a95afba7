//! Library side of the `hspot` command: verification suites, scenario files, growth probes
//! and report persistence. The binary is a thin argument parser over these pieces.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod format;
pub mod kernel;
pub mod output;
pub mod probe;
pub mod scenario;
pub mod suites;

use thiserror::Error;

/// Exit code for a run whose checks all pass.
pub const EXIT_PASS: i32 = 0;
/// Exit code for a run with at least one failing check.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario line {line}: {message}")]
    Scenario { line: usize, message: String },
    #[error("{0}")]
    Library(#[from] hspot::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
