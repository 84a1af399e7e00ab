use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: operands are sampled on different grids")]
    SpecMismatch,
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("cube does not intersect the grid")]
    EmptyCube,
    #[error("mollifier scale t={t} is below 2h={min}; kernel under-resolved")]
    UnderResolved { t: f64, min: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("zero atom: projection annihilated the profile")]
    ZeroAtom,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("kernel verification failed: {0}")]
    Kernel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
