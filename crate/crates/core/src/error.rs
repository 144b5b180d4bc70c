use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix dimension must be positive")]
    EmptyDimension,

    #[error("unknown {what} `{value}`")]
    UnknownName { what: &'static str, value: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("variance profile is not symmetric at ({row}, {col})")]
    AsymmetricProfile { row: usize, col: usize },

    #[error("variance profile entry ({row}, {col}) = {value} is negative or not finite")]
    InvalidProfileEntry { row: usize, col: usize, value: f64 },

    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{0} is infinite for this ensemble")]
    InfiniteVariance(&'static str),

    #[error("unsupported entry law for {0}")]
    UnsupportedLaw(&'static str),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("malformed walk {seq:?}: {reason}")]
    MalformedWalk { seq: Vec<usize>, reason: &'static str },

    #[error("graph is not a tree: {0}")]
    NotATree(&'static str),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
