use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("control parameter {index} = {value} outside device range [{min}, {max}]")]
    ControlOutOfRange {
        index: usize,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("saturated statistic for {what} {index}: |mean| = 1, offset is unbounded")]
    Saturated { what: &'static str, index: usize },

    #[error("insufficient histogram overlap: {populated} bins populated in both sets, need at least 2")]
    InsufficientOverlap { populated: usize },

    #[error("non-physical temperature estimate: slope {slope} with scale factor {x} gives beta {beta}")]
    NonPhysical { slope: f64, x: f64, beta: f64 },

    #[error("degenerate pseudo-likelihood landscape: every local field vanishes")]
    DegenerateLandscape,

    #[error("importance weights are degenerate: {0}")]
    DegenerateWeights(String),

    #[error("no convergence after {iterations} iterations (last step {last_step})")]
    Convergence { iterations: usize, last_step: f64 },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that come from the numerics rather than from the
    /// caller's inputs or the filesystem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Saturated { .. }
                | Error::InsufficientOverlap { .. }
                | Error::NonPhysical { .. }
                | Error::DegenerateLandscape
                | Error::DegenerateWeights(_)
                | Error::Convergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
