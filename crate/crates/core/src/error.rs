use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin length 2j = {0}")]
    SpinLength(i64),
    #[error("argument is not a half-integer: {0}")]
    NotHalfInteger(f64),
    #[error("direction out of range: theta = {theta}, phi = {phi}")]
    Direction { theta: f64, phi: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state is not normalized: {0}")]
    NotNormalized(f64),
    #[error("spin length j = {0} is outside the stable range of the P-function (j <= 30)")]
    UnstableRange(f64),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("divergent quantity: {0}")]
    Divergent(String),
    #[error("quadrature failed to converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
