use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit site {site} out of range for a {n_qubits}-qubit register")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("sites must be distinct, got {0:?}")]
    DuplicateSites(Vec<usize>),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("malformed Pauli string {0:?}")]
    MalformedPauli(String),

    #[error("malformed basis label {0:?}")]
    MalformedBitstring(String),

    #[error("Kraus operators are not complete (max deviation {deviation:.3e})")]
    NotComplete { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid matrix shape: {0}")]
    BadShape(String),

    #[error("numerical health check failed: {0}")]
    NumericalHealth(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projection has zero norm")]
    ZeroNorm,

    #[error("least-squares fit failed: {reason} (residual sum of squares {rss:.3e})")]
    FitFailed { reason: String, rss: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalHealth(_) | Error::ZeroNorm)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
