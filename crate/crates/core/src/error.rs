use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared across the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("non-finite value encountered in {op}")]
    NonFinite { op: &'static str },

    #[error("{op}: {detail}")]
    InvalidArgument { op: &'static str, detail: String },

    #[error("signal too short for transform: length {0} < 2")]
    SignalTooShort(usize),

    #[error("image {width}x{height} too small for {levels} decomposition levels")]
    ImageTooSmall {
        width: usize,
        height: usize,
        levels: usize,
    },

    #[error("aperture disc (radius {radius}, margin {margin}) does not fit in {width}x{height} frame")]
    DiscOutsideFrame {
        radius: f64,
        margin: f64,
        width: usize,
        height: usize,
    },

    #[error("training diverged at epoch {epoch}, batch {batch}: {detail}")]
    TrainingDiverged {
        epoch: usize,
        batch: usize,
        detail: String,
    },

    #[error("inconsistent architecture: {0}")]
    BadArchitecture(String),

    #[error("{path}: malformed {format} at byte {offset}: {detail}")]
    RasterFormat {
        path: PathBuf,
        format: &'static str,
        offset: u64,
        detail: String,
    },

    #[error("{path}: {detail}")]
    Config { path: PathBuf, detail: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(op: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidArgument {
            op,
            detail: detail.into(),
        }
    }

    pub fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            detail: detail.into(),
        }
    }
}
