use thiserror::Error;

use crate::formal_algebra::Rational;

/// Every failure mode of the engine. Verification *mismatches* are not errors;
/// they are carried as report payloads (see [`crate::report`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at hbar = {0}")]
    Pole(Rational),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate lambda: {0}")]
    DegenerateLambda(String),

    #[error("class-P violation: {0}")]
    ClassP(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cross-validation failure: {0}")]
    CrossCheck(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
