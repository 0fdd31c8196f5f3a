use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the profile extent [{lo}, {hi}]")]
    OutOfExtent { x: f64, lo: f64, hi: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("insufficient regularity: {0}")]
    Regularity(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
