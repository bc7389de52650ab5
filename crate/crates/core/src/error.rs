use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "operands live in different rings (N={left_n}, q={left_q} vs N={right_n}, q={right_q})"
    )]
    ParamMismatch {
        left_n: usize,
        left_q: u128,
        right_n: usize,
        right_q: u128,
    },

    #[error("operands are in different representations (coefficient vs evaluation)")]
    RepresentationMismatch,

    #[error("ring has no NTT for this modulus; evaluation form unavailable")]
    NttUnavailable,

    #[error("scale mismatch: {left} vs {right}")]
    ScaleMismatch { left: u128, right: u128 },

    #[error("expected {expected} coefficients, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("coefficient {value} is not reduced modulo {q}")]
    UnreducedCoefficient { value: u128, q: u128 },

    #[error("encoding overflow: |{value} * {scale}| must stay below q/4")]
    EncodeOverflow { value: f64, scale: u128 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("scalar {scalar} would overflow the noise budget (limit {limit})")]
    ScalarOverflow { scalar: i128, limit: u128 },

    #[error("malformed encoding: {0}")]
    Format(String),
}
