//! Crate-wide error types.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain and numerical failures surfaced by the library.
///
/// Validation failures describe bad inputs; `Singular`, `NoConvergence` and
/// `PowerOverflow` signal that a computation hit the limits of double
/// precision on an otherwise well-formed input. Indices that refer to
/// spectrum points are one-based, matching the labelling `l_1..l_m` used
/// throughout the documentation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be non-empty")]
    EmptyMatrix,

    #[error("{rows}x{cols} matrix needs {} entries, got {got}", rows * cols)]
    EntryCount { rows: usize, cols: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} exceeds the dense-solver cap of {max}")]
    DimensionCap { dim: usize, max: usize },

    #[error("matrix is singular to working tolerance")]
    Singular,

    #[error("no convergence after {iterations} iterations; input is pathological at double precision")]
    NoConvergence { iterations: usize },

    #[error("matrix power overflowed at k = {k}; input is not power-bounded at double precision")]
    PowerOverflow { k: usize },

    #[error("spectrum must be non-empty")]
    EmptySpectrum,

    #[error("spectrum point {index} has modulus {modulus}; points must satisfy |l| <= 1 - 1e-9 (nudge boundary eigenvalues radially inward)")]
    OutsideDisk { index: usize, modulus: f64 },

    #[error("zeta is within {distance:e} of a spectrum point; resolvent quantities diverge there")]
    ZetaOnSpectrum { distance: f64 },

    #[error("zeta is within working tolerance of the reflected pole 1/conj(l_{index})")]
    AtReflectedPole { index: usize },

    #[error("spectrum points {i} and {j} are closer than the 1e-6 node gap; this operation needs distinct nodes")]
    CoincidentNodes { i: usize, j: usize },

    #[error("index out of range: {what} = {got}, limit {limit}")]
    IndexRange { what: &'static str, got: usize, limit: usize },

    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error(
        "cotangent residual does not change sign over [{left}, {right}]; \
         the root bracket is proved, so this indicates a solver bug"
    )]
    BracketSignCheck { left: f64, right: f64 },

    #[error("matrix is not column-stochastic: {summary}")]
    NotStochastic { summary: String },

    #[error("eigenvalue 1 of the transition matrix is not simple; the stationary state is not unique")]
    NonUniqueStationary,

    #[error("superoperator is not trace-preserving (trace row defect {defect:e})")]
    NotTracePreserving { defect: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Failures while decoding text inputs (matrix files, literals, grid specs).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("bad complex literal {text:?}: {message}")]
    ComplexLiteral { text: String, message: String },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("matrix json: {message}")]
    MatrixJson { message: String },

    #[error("bad grid spec {text:?}: {message}")]
    GridSpec { text: String, message: String },

    #[error("spectrum literal: {message}")]
    SpectrumLiteral { message: String },
}

impl Error {
    /// Convenience constructor for parameter violations.
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter { name, message: message.into() }
    }
}
