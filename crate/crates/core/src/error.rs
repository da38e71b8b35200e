use std::path::PathBuf;

use crate::sim::CoverageReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid size {0}: edge length must be a power of two")]
    InvalidSize(u64),

    #[error("{what} = {value} is out of range (expected {expected})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        expected: String,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "coverage violation: {} duplicates, {} misses, {} stray writes",
        .0.duplicates.len(),
        .0.misses.len(),
        .0.strays.len()
    )]
    Coverage(Box<CoverageReport>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: u64,
        expected: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            what,
            value,
            expected: expected.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
