use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("measures live on different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("weights must sum to 1 within 1e-12, got {sum}")]
    NotNormalized { sum: f64 },

    #[error("negative weight {weight} at atom {index}")]
    NegativeWeight { weight: f64, index: usize },

    #[error("non-finite coordinate or weight at atom {index}")]
    NonFinite { index: usize },

    #[error("point ({x}, {y}) outside {space}")]
    OutOfSpace { x: f64, y: f64, space: String },

    #[error("empty measure")]
    EmptyMeasure,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("period {n} exceeds the enumeration guard {max}")]
    PeriodTooLarge { n: usize, max: usize },

    #[error("{points} periodic points exceed the enumeration budget {max}")]
    TooManyPeriodicPoints { points: u128, max: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
