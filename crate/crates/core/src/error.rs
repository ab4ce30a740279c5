use std::fmt;

use thiserror::Error;

/// Which line of a square a Latin violation was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching the file formats
        match self {
            Line::Row(i) => write!(f, "row {}", i + 1),
            Line::Column(j) => write!(f, "column {}", j + 1),
        }
    }
}

/// A single failure of the semi-Latin property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CellSize { row: usize, col: usize, found: usize, expected: usize },
    OutOfRange { row: usize, col: usize, treatment: u32 },
    RepeatedInCell { row: usize, col: usize, treatment: u32 },
    Repeated { line: Line, treatment: u32 },
    Missing { line: Line, treatment: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CellSize { row, col, found, expected } => write!(
                f,
                "cell ({}, {}) has {} treatments, expected {}",
                row + 1,
                col + 1,
                found,
                expected
            ),
            Violation::OutOfRange { row, col, treatment } => write!(
                f,
                "cell ({}, {}) contains treatment {} outside the allowed range",
                row + 1,
                col + 1,
                treatment
            ),
            Violation::RepeatedInCell { row, col, treatment } => write!(
                f,
                "cell ({}, {}) contains treatment {} more than once",
                row + 1,
                col + 1,
                treatment
            ),
            Violation::Repeated { line, treatment } => {
                write!(f, "treatment {treatment} occurs more than once in {line}")
            }
            Violation::Missing { line, treatment } => {
                write!(f, "treatment {treatment} is missing from {line}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} is too large for table arithmetic")]
    FieldTooLarge(u64),
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("not a semi-Latin square: {}", join(.0))]
    NotSemiLatin(Vec<Violation>),
    #[error("not a Latin square: {0}")]
    NotLatin(String),
    #[error("invalid block design: {0}")]
    InvalidDesign(String),
    #[error("design is not equireplicate with constant block size")]
    IrregularDesign,
    #[error("square is not uniform")]
    NotUniform,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("design is not affine resolvable under the given resolution")]
    NotAffineResolvable,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("matrix is not symmetric (|a[{0}][{1}] - a[{1}][{0}]| too large)")]
    Asymmetric(usize, usize),
    #[error("squares {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("automorphism group order overflows u128")]
    GroupOrderOverflow,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
