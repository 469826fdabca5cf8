use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index or dimension lies outside the available range.
    #[error("range error: {0}")]
    Range(String),

    /// The truncated series still carries too much probability beyond `n_max`.
    #[error(
        "truncation error: tail mass {tail_mass:.3e} exceeds threshold {threshold:.3e} at n_max = {n_max}"
    )]
    Truncation {
        n_max: usize,
        tail_mass: f64,
        threshold: f64,
    },

    /// The defining series does not converge for the requested parameters.
    #[error("divergence: |alpha|^2 = {value} is outside the convergence radius {radius}")]
    Divergence { value: f64, radius: f64 },

    /// The requested quantity is undefined for this state (zero vector, vacuum, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("overflow: {0}")]
    Overflow(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
