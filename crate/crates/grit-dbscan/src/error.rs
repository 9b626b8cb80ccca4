//! Crate-wide error type.

use std::fmt;

/// Errors reported by constructors and builders in this crate.
///
/// Contract violations in hot-path operations (e.g. passing slices of
/// mismatched dimension to [`crate::points::distance`]) panic instead;
/// this enum covers conditions that depend on caller-supplied data.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that requires a non-empty input received an empty one.
    EmptyInput,
    /// A parameter is outside its valid domain.
    InvalidParameter {
        name: &'static str,
        message: String,
    },
    /// A point row does not have the expected number of coordinates.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate is NaN or infinite.
    NonFiniteCoordinate { point: usize, dim: usize },
    /// Grid tree construction requires grids in lexicographic identifier order.
    UnsortedGrids { position: usize },
    /// The same grid identifier appeared twice in a grid set.
    DuplicateGrid { position: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "input must be non-empty"),
            Error::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} coordinates, got {got}")
            }
            Error::NonFiniteCoordinate { point, dim } => {
                write!(f, "non-finite coordinate at point {point}, dimension {dim}")
            }
            Error::UnsortedGrids { position } => {
                write!(f, "grid identifiers not in lexicographic order at position {position}")
            }
            Error::DuplicateGrid { position } => {
                write!(f, "duplicate grid identifier at position {position}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
