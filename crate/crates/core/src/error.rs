use std::path::PathBuf;

use thiserror::Error;

use crate::recording::{Electrode, EmotionLabel};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Convergence,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing channel column `{0}` in recording header")]
    MissingColumn(Electrode),

    #[error("row {row}, column {column}: cannot parse `{value}` as a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column}: non-finite sample value `{value}`")]
    NonFinite {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("recording has {rows} rows, at least {required} required (two seconds of data)")]
    TooShort { rows: usize, required: usize },

    #[error("recording metadata: {0}")]
    Metadata(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("{field} value {value} outside the 1..=9 SAM scale")]
    SamOutOfRange { field: &'static str, value: i64 },

    #[error("duplicate recording_id `{0}`")]
    DuplicateRecording(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("signal of {len} samples is shorter than one {needed}-sample segment")]
    SignalTooShort { len: usize, needed: usize },

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("band {lo}..{hi} Hz exceeds the Nyquist frequency {nyquist} Hz")]
    BandAboveNyquist { lo: f64, hi: f64, nyquist: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("class {0} has no instances")]
    EmptyClass(EmotionLabel),

    #[error(
        "training split of fold {fold} has no {label} instances; use fewer folds or rebalance"
    )]
    FoldMissingClass { fold: usize, label: EmotionLabel },

    #[error("binary training set must contain both classes")]
    SingleClass,

    #[error("SMO did not converge within {passes} passes (max KKT violation {max_violation:.3e})")]
    Convergence { passes: usize, max_violation: f64 },

    #[error("synthetic profile infeasible: {0}")]
    InfeasibleProfile(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Convergence { .. } => ErrorKind::Convergence,
            Error::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Validation,
        }
    }
}

/// Extension for tagging an error with the pipeline stage it came from.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
