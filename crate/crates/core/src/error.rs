use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quantile search did not converge for Beta({a}, {b}) at q={q} (residual {residual:e})"
    )]
    Convergence {
        a: f64,
        b: f64,
        q: f64,
        residual: f64,
    },

    #[error("estimate undefined for n = 0")]
    UndefinedEstimate,

    #[error("infeasible moments: variance {variance} must be below mean*(1-mean) = {bound}")]
    InfeasibleMoments { variance: f64, bound: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("relation is empty")]
    EmptyRelation,

    #[error("invalid relation: {0}")]
    InvalidRelation(String),

    #[error("rank {requested} out of range (curve has {available} points)")]
    Range { requested: usize, available: usize },

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("invalid estimator spec `{spec}`: {reason}")]
    EstimatorSpec { spec: String, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
