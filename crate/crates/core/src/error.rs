use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("distance must be positive, got {0} m")]
    InvalidDistance(f64),

    #[error("load factor must lie in [0, 1], got {0}")]
    InvalidLoad(f64),

    #[error("weight {name} = {value} outside [0, 1]")]
    InvalidWeight { name: &'static str, value: f64 },

    #[error("switch vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("link to base station {0} is not terrestrial")]
    NotTerrestrial(usize),

    #[error(
        "exhaustive search over {gamma} small cells needs 2^{gamma} evaluations; cap is {cap}"
    )]
    ExhaustiveCap { gamma: usize, cap: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
