use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid link specification: {0}")]
    InvalidLink(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("design matrix is rank deficient; colinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("row {row}: field `{field}`: {message}")]
    Record {
        row: usize,
        field: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("sampler initialization failed: {0}")]
    Init(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error originates in input data rather than arguments or numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Record { .. }
                | Error::Schema { .. }
                | Error::Csv(_)
                | Error::Io(_)
                | Error::RankDeficient { .. }
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Init(_))
    }
}
