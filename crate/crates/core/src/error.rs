use thiserror::Error;

/// Errors produced by the kernel, the protocol runners and the scenario layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A register would exceed the dense-simulation capacity.
    #[error("register capacity exceeded: {requested} qubits (max {max})")]
    Capacity { requested: usize, max: usize },

    /// A qubit index is out of range for the register it was used with.
    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    /// An input failed a mathematical precondition (non-unitary matrix,
    /// arity mismatch, size mismatch, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The trusted authentication oracle rejected a party.
    #[error("authentication rejected: {0}")]
    Authentication(String),

    /// An operation was invoked outside its protocol contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A cross-check inside a protocol run failed; this never happens in a
    /// correct build and maps to its own process exit code.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Resource accounting could not be completed.
    #[error("accounting error: {0}")]
    Accounting(String),

    /// A scenario configuration field is invalid.
    #[error("configuration error in `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },

    /// A declared but intentionally unimplemented option was selected.
    #[error("not implemented: {0}")]
    Unimplemented(&'static str),

    /// Qubit efficiency is undefined when no resources were spent.
    #[error("undefined efficiency: q + b = 0")]
    UndefinedEfficiency,

    /// Transcript parsing failed.
    #[error("transcript parse error: {0}")]
    TranscriptParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
