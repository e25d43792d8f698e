use alloc::string::String;
use core::fmt;

/// Errors raised by constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shapes of operands are incompatible.
    DimensionMismatch { expected: usize, found: usize },
    /// A matrix that should be square is not.
    NotSquare { rows: usize, cols: usize },
    /// An entry is NaN or infinite.
    NonFinite,
    /// A matrix failed the Hermiticity test.
    NotHermitian { deviation: f64 },
    /// Trace differs from one by more than the tolerance.
    TraceNotOne { trace: f64 },
    /// A state or effect has an eigenvalue below `-tolerance`.
    NotPositive { min_eigenvalue: f64 },
    /// A state vector is not normalized.
    NotNormalized { norm: f64 },
    /// A subsystem dimension is below two or above the supported range.
    InvalidDimension(usize),
    /// POVM effects or Kraus operators do not sum to the identity.
    Incomplete { deviation: f64 },
    /// An outcome index is out of range.
    InvalidOutcome { outcome: usize, count: usize },
    /// A setting or quantity label is unknown.
    UnknownLabel(String),
    /// A probability table is malformed (negative entry, bad normalization, bad shape).
    InvalidTable(String),
    /// An empty catalog or list was given where at least one element is required.
    Empty(&'static str),
    /// A precondition of the operation does not hold.
    Precondition(String),
    /// A supplied decomposition does not reproduce the state.
    DecompositionMismatch { residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, expected square")
            }
            Error::NonFinite => f.write_str("matrix contains a non-finite entry"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::TraceNotOne { trace } => write!(f, "trace is {trace}, expected 1"),
            Error::NotPositive { min_eigenvalue } => {
                write!(
                    f,
                    "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
                )
            }
            Error::NotNormalized { norm } => write!(f, "state vector has norm {norm}, expected 1"),
            Error::InvalidDimension(d) => write!(f, "invalid subsystem dimension {d}"),
            Error::Incomplete { deviation } => {
                write!(
                    f,
                    "operators do not sum to the identity (deviation {deviation:e})"
                )
            }
            Error::InvalidOutcome { outcome, count } => {
                write!(f, "outcome {outcome} out of range for {count} outcomes")
            }
            Error::UnknownLabel(l) => write!(f, "unknown label `{l}`"),
            Error::InvalidTable(msg) => write!(f, "invalid table: {msg}"),
            Error::Empty(what) => write!(f, "{what} must not be empty"),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::DecompositionMismatch { residual } => {
                write!(
                    f,
                    "decomposition does not reproduce the state (residual {residual:e})"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
