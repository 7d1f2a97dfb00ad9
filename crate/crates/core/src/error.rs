use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse grouping of errors, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    NotRealizable,
    Optimizer,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight vector has zero dual norm")]
    ZeroWeight,
    #[error("no perturbation set registered for example {index}")]
    MissingPerturbations { index: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid norm exponent {0}")]
    InvalidNorm(f64),
    #[error("inflated dataset would hold {size} points, cap is {cap}")]
    SizeLimit { size: usize, cap: usize },
    #[error("separation oracle returned a hyperplane that does not cut the query point")]
    OracleViolation,
    #[error("no robust separator found within the ellipsoid budget")]
    NotSeparable,
    #[error("all sample weights are zero")]
    AllZeroWeights,
    #[error("sample source exhausted")]
    SourceExhausted,
    #[error("stream exhausted before a surviving model was found")]
    StreamExhausted,
    #[error("weak learner failed the 1/3 error contract in round {round} after {attempts} attempts")]
    WeakLearnerFailed { round: usize, attempts: usize },
    #[error("sparsification did not reach zero loss after {attempts} attempts")]
    RetryLimit { attempts: usize },
    #[error("online learner exceeded its mistake cap of {cap}")]
    MistakeCapExceeded { cap: usize },
    #[error("hypothesis pool is empty")]
    EmptyPool,
    #[error("no pool member is robustly consistent with the data")]
    NoRealizableMember,
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) | Error::InvalidNorm(_) | Error::Unsupported(_) => {
                ErrorKind::Config
            }
            Error::UnsupportedGeometry(_) => ErrorKind::Config,
            Error::EmptyDataset
            | Error::DimensionMismatch { .. }
            | Error::MissingPerturbations { .. }
            | Error::SizeLimit { .. }
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::SourceExhausted
            | Error::StreamExhausted
            | Error::EmptyPool => ErrorKind::Data,
            Error::NotSeparable
            | Error::MistakeCapExceeded { .. }
            | Error::NoRealizableMember
            | Error::WeakLearnerFailed { .. }
            | Error::RetryLimit { .. } => ErrorKind::NotRealizable,
            Error::ZeroWeight | Error::OracleViolation | Error::AllZeroWeights => {
                ErrorKind::Optimizer
            }
        }
    }
}
