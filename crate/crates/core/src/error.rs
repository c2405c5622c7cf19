use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty mask")]
    EmptyMask,

    #[error("mask is antipodally balanced (mean direction norm {0:.3e})")]
    DegenerateCentroid(f64),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("box lies entirely outside the local image")]
    BoxOutside,

    #[error("template ({template:?}) is larger than the local image ({image:?})")]
    TemplateTooLarge {
        template: (usize, usize),
        image: (usize, usize),
    },

    #[error("tracker used before init")]
    NotInitialized,

    #[error("stream length mismatch: {gt} ground-truth frames, {results} result frames")]
    LengthMismatch { gt: usize, results: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
