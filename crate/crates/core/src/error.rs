use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive semi-definite (Cholesky failed at jitter {max_jitter:e})")]
    NotPsd { max_jitter: f64 },

    #[error("coherence undefined at frequency {nu:?}: auto-spectrum vanishes")]
    UndefinedCoherence { nu: Vec<f64> },

    #[error("non-finite target value encountered during quadrature")]
    NonFiniteQuadrature,

    #[error("coordinate descent did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("every restart produced a non-finite objective")]
    AllRestartsFailed,

    #[error("degenerate variance: {0}")]
    DegenerateVariance(&'static str),

    #[error("series too short: {len} points, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column `{column}`: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("time column is not strictly increasing at line {line}")]
    NonMonotoneTime { line: u64 },

    #[error("config error in {path} at `{field}`: {message}")]
    Config {
        path: String,
        field: String,
        message: String,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The innermost error beneath any [`Error::Stage`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
