use crate::model::Violation;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} is out of range for an instance with {n} requests")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("route is structurally invalid: {0}")]
    Structural(Violation),

    #[error("route is infeasible: {0}")]
    Infeasible(Violation),

    #[error("instance has {n} requests, exhaustive search is limited to {max}")]
    TooLarge { n: usize, max: usize },

    #[error("route serves {served} requests, neighbourhood enumeration is limited to {max}")]
    EnumerationLimit { served: usize, max: usize },

    #[error("no feasible route exists for this instance")]
    NoFeasibleRoute,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown method token `{0}`")]
    UnknownMethod(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by user configuration rather than by the data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::UnknownMethod(_))
    }
}
