//! Error types shared across the compiler.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver deadline reached without a solution")]
    Timeout,
    #[error("no path between nodes {0} and {1}")]
    NoPath(usize, usize),
    #[error("routing failed: {0}")]
    Routing(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Sat(#[from] esmc_sat::SatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
