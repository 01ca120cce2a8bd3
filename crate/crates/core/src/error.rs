use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage at which a search gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    KillSet,
    AuxiliarySet,
    QSequence,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::KillSet => "kill set",
            Stage::AuxiliarySet => "auxiliary set",
            Stage::QSequence => "q sequence",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is not an odd prime")]
    BadModulus(u64),
    #[error("{ell} is not congruent to 1 mod {p}")]
    NotOneModP { ell: u64, p: u64 },
    #[error("{a} is not a unit modulo {ell}")]
    NotCoprime { a: u64, ell: u64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("place {0} lies in the marked set")]
    PlaceInT(u64),
    #[error("{0} is not a column place of the genus group")]
    NotAColumn(u64),
    #[error("{0} lies in the ramification set")]
    PlaceInS(u64),
    #[error("character is ramified at {0}; Frobenius value is not defined")]
    RamifiedCharacterEval(u64),
    #[error("no local H^2 at {0}")]
    NoLocalH2(u64),
    #[error("characters live on different genus groups")]
    GenusMismatch,
    #[error("Kummer group V_S^T has dimension {0}; local description of H^2 does not apply")]
    KummerNonzero(usize),
    #[error("U and V do not span H^1")]
    SpanningViolated,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search exhausted at {stage}{} below bound {bound}", index.map(|a| format!(" (index {a})")).unwrap_or_default())]
    SearchExhausted {
        stage: Stage,
        index: Option<usize>,
        bound: u64,
    },
    #[error("internal contradiction: {0}")]
    Internal(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}
