// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (phase exponent {phase_exp})")]
    NonHermitian { phase_exp: u8 },

    #[error("{what} of size {size} exceeds the limit of {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown path label `{0}`")]
    UnknownPath(String),

    #[error("post-selection kept no terms: {0}")]
    EmptyPostSelection(String),

    #[error("modeling error: {0}")]
    Modeling(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
