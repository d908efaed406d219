use thiserror::Error;

use crate::exact::ExactError;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),

    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    #[error("composition requires the inner series to have zero constant term")]
    CompositionRequiresZeroConstant,
    #[error("series has no compositional inverse: need f(0) = 0 and f'(0) != 0")]
    NotCompositionallyInvertible,

    #[error("row {row} is not available (matrix `{name}` is defined through row {limit} only)")]
    RowUnavailable { name: String, row: usize, limit: usize },
    #[error("invalid index set: {0}")]
    BadIndexSet(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero diagonal entry at index {0}")]
    SingularDiagonal(usize),
    #[error("matrix is not lower triangular: nonzero entry at ({0}, {1})")]
    NotLowerTriangular(usize, usize),

    #[error("graph contains a cycle")]
    CyclicGraph,
    #[error("network has {edges} edges, above the oracle cap of {cap}")]
    TooLargeForOracle { edges: usize, cap: usize },
    #[error("network is not a standard binomial-like network: {0}")]
    NotBinomialLike(String),
    #[error("cannot glue: {sinks} sinks against {sources} sources")]
    ArityMismatch { sinks: usize, sources: usize },
    #[error("network was not built as a composite for A")]
    NotComposite,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("matrix cannot be realized by a nonnegative network: {0}")]
    NotRealizable(String),

    #[error("truncation order {order} is too small for {rows} rows")]
    TruncationTooSmall { order: usize, rows: usize },
    #[error("not an admissible Riordan pair: {0}")]
    NotAdmissible(String),
    #[error("sequence too short: need {needed} terms, have {have}")]
    InsufficientSequence { needed: usize, have: usize },
    #[error("negative entry at index {0}")]
    NegativeEntry(usize),

    #[error("unknown triangle `{0}`")]
    UnknownTriangle(String),
    #[error("no fixture bundled for `{0}`")]
    MissingFixture(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
