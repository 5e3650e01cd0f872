//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, and optimization.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed source text.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// A gate name outside the accepted set.
    #[error("unsupported gate `{name}` at line {line}")]
    UnsupportedGate { name: String, line: usize },

    /// A qubit index at or beyond the register size.
    #[error("qubit index {index} out of range for {n_qubits} qubit(s)")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    /// The same qubit named twice in one gate application.
    #[error("duplicate qubit indices {indices:?}")]
    DuplicateQubits { indices: Vec<usize> },

    /// A gate applied to the wrong number of qubits.
    #[error("gate `{name}` takes {expected} qubit(s), got {actual}")]
    ArityMismatch {
        name: String,
        expected: usize,
        actual: usize,
    },

    /// Dense simulation is capped at [`MAX_QUBITS`](crate::MAX_QUBITS).
    #[error("{n_qubits} qubits exceeds the {max}-qubit simulation limit")]
    TooManyQubits { n_qubits: usize, max: usize },

    /// A parameter vector of the wrong length.
    #[error("expected {expected} parameter(s), got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A gate that has no representation in the native parameterized set.
    #[error("gate `{name}` is not in the native gate set")]
    NonNativeGate { name: String },

    /// Error rate outside `[0, 1)`.
    #[error("invalid error rate {0}; must lie in [0, 1)")]
    InvalidErrorRate(f64),

    /// Matrices of different dimensions where equal ones are required.
    #[error("matrix dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),

    /// An error rate attached to a gate that the noise model ignores.
    #[error("error_rate is only valid on entangling gates, found on `{name}`")]
    ErrorRateOnSingleQubitGate { name: String },

    /// The objective produced NaN or infinity during a search.
    #[error("objective returned a non-finite value at theta = {theta:?}")]
    NonFiniteObjective { theta: Vec<f64> },

    /// Invalid optimizer configuration.
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    /// A failure inside one optimization window, tagged with its index.
    #[error("window {window} (gates {start}..{end}): {source}")]
    Window {
        window: usize,
        start: usize,
        end: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
