use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid margin spec: {0}")]
    InvalidMarginSpec(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("auxiliary alphabet size {requested} exceeds the cardinality cap {cap}")]
    Cardinality { requested: usize, cap: usize },

    #[error("no restart reached conditional independence (best penalty {best_penalty:.3e})")]
    InfeasibleWitness { best_penalty: f64 },

    #[error("axis {axis} out of range for {parties} parties")]
    InvalidAxis { axis: usize, parties: usize },

    #[error("invalid privacy threshold t={t} for {parties} parties")]
    InvalidThreshold { t: usize, parties: usize },

    #[error("certificate error: {0}")]
    Certificate(String),

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),
}

pub type Result<T> = std::result::Result<T, Error>;
