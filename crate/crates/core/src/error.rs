use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("schedule out of range: {0}")]
    ScheduleRange(String),

    #[error("power iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("integration failed for edge ({}, {}) at t = {t}: {detail}", .row + 1, .col + 1)]
    Integration {
        row: usize,
        col: usize,
        t: f64,
        detail: String,
    },

    #[error("Kendall tau is undefined: {0}")]
    UndefinedTau(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent event stream at line {line}: {message}")]
    Consistency { line: usize, message: String },

    #[error("network source not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
