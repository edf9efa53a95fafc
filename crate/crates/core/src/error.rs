//! Error type shared by every stage of the analysis.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed CSV input. `row` is 1-based over the whole file (header is row 1),
    /// `column` is 1-based when the problem is tied to a single cell.
    #[error("parse error at row {row}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        row: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error(
        "empty pass-band: no harmonic of a {n_samples}-sample record has a period in [{min_period}, {max_period}]"
    )]
    EmptyPassBand {
        n_samples: usize,
        min_period: f64,
        max_period: f64,
    },

    #[error("series too short: need at least {required} samples, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(row: usize, column: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            column,
            message: message.into(),
        }
    }
}
