use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("local dimension {0} is not supported (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("{sites} sites of dimension {local_dim} exceed the simulation cap of {cap} amplitudes")]
    TooManySites { sites: usize, local_dim: usize, cap: usize },
    #[error("site {site} out of range for {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },
    #[error("two-site gate needs distinct sites, got {0} twice")]
    DuplicateSite(usize),
    #[error("matrix is {found}x{found}, expected {expected}x{expected}")]
    MatrixShape { expected: usize, found: usize },
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid subspace ({0}, {1})")]
    InvalidSubspace(usize, usize),
    #[error("Gell-Mann index {0} out of range 1..=8")]
    GellMannIndex(usize),
    #[error("gate {gate} {reason}")]
    GateParameter { gate: String, reason: &'static str },
    #[error("gate {0} has no parameter-shift rule")]
    NotParametrized(String),
    #[error("unknown gradient method {0:?}")]
    UnknownGradientMethod(String),
    #[error("expected {expected} parameters, got {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("circuit dimension {dim} exceeds the dense-unitary guard of {cap}")]
    UnitaryTooLarge { dim: usize, cap: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("non-finite {what} at step {step}")]
    NonFinite { what: &'static str, step: usize },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
