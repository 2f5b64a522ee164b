use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps the variants onto exit codes, so new variants should be
/// classified there as well.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {what} needs {requested} qubits, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("missing measurement bases: {}", .bases.join(", "))]
    MissingMeasurement { bases: Vec<String> },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("schema violation in {location}: {msg}")]
    Schema { location: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_same_qubits(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{what}: {a} qubits vs {b} qubits")));
    }
    Ok(())
}
