use std::path::PathBuf;

use thiserror::Error;

/// Every failure surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {name} = {value} ({constraint})")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),

    #[error("fit failed after {iterations} iterations: {reason} (chi2 = {chi2:.4e})")]
    FitFailure {
        reason: String,
        iterations: usize,
        chi2: f64,
    },

    #[error("incomplete report: missing `{0}`")]
    IncompleteReport(&'static str),

    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        key: String,
        line: usize,
        message: String,
    },

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint: "must be positive and finite",
        })
    }
}

pub(crate) fn ensure_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint: "must lie in [0, 1]",
        })
    }
}
