use thiserror::Error;

/// Errors raised by instance construction, mechanisms, oracles and the file format.
#[derive(Debug, Error)]
pub enum Error {
    /// An instance, allocation or decomposition does not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    /// A parameter is outside of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exhaustive search would exceed its configured capacity.
    #[error("capacity exceeded: {what} needs {size} candidates, limit is {limit}")]
    Capacity {
        what: String,
        size: u128,
        limit: u128,
    },

    /// The mechanism cannot run on this kind of instance.
    #[error("mechanism `{mechanism}` is not applicable to {instance} instances")]
    Inapplicable { mechanism: String, instance: String },

    /// A ratio was requested against a zero optimum.
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    /// Malformed instance or allocation file. `line`/`column` are 1-based, 0 when unknown.
    #[error("parse error{}: {message}", location(*line, *column))]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn location(line: usize, column: usize) -> String {
    match (line, column) {
        (0, _) => String::new(),
        (l, 0) => format!(" at line {l}"),
        (l, c) => format!(" at line {l}, column {c}"),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
