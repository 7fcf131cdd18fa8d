use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("shape mismatch: expected dimension {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("rank deficient: row {row} has residual norm {norm:e} after orthogonalization")]
    RankDeficient { row: usize, norm: f64 },

    #[error("degenerate profile: sigma_eps is 0 (all mass at the mean)")]
    DegenerateProfile,

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 for usage/parameter errors, 2 for data/IO errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
            _ => 1,
        }
    }
}
