use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an even node count >= 8, got {0}")]
    InvalidGrid(usize),

    #[error("fields live on different grids ({left} vs {right} nodes)")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("omega must be strictly positive, found {value} at node {index}")]
    NonPositiveOmega { index: usize, value: f64 },

    #[error("non-finite value in computed field")]
    NonFinite,

    #[error("states are at different times ({0} vs {1})")]
    TimeMismatch(f64, f64),

    #[error("time {t} is past the comparison pole 1/|xi0| = {pole}")]
    RiccatiDomain { t: f64, pole: f64 },

    #[error("line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
