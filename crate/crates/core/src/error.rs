use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("factor has {size} elements; exhaustive up-set enumeration is capped at {cap}")]
    FactorTooLarge { size: usize, cap: usize },
    #[error("space has {count} outcomes; enumeration is capped at {cap}")]
    SpaceTooLarge { count: u128, cap: usize },
    #[error("space has {0} coordinates; at most 64 are supported")]
    TooManyCoordinates(usize),
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {coord} has element index {index} out of range")]
    OutOfRange { coord: usize, index: usize },
    #[error("events live on different spaces")]
    SpaceMismatch,
    #[error("{count} events exceeds the subfamily enumeration cap of {cap}")]
    TooManyEvents { count: usize, cap: usize },
    #[error("event is not {0}")]
    NotMonotone(&'static str),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("factor {0} is not linearly ordered")]
    NonLinearFactor(usize),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}
