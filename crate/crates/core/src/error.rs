use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("U must be even (got U={0})")]
    OddUeCount(usize),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate equalizer: column for UE {ue} is zero")]
    DegenerateEqualizer { ue: usize },

    #[error("regularized Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("bit count {bits} is not a multiple of {per_symbol} bits per symbol")]
    BitLength { bits: usize, per_symbol: usize },

    #[error("refused: {count} candidate schedules exceeds cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
