use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("atom count {count} exceeds the cap of {cap}; coarsen the input law")]
    AtomExplosion { count: usize, cap: usize },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("function is not convex: {0}")]
    NotConvex(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("tensor dimension {size} exceeds the cap of {cap}; use the spectral path")]
    SizeCap { size: usize, cap: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error: 2 for unusable input, 3 for a
    /// violated precondition, 4 when a size cap is hit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::NonSquare { .. }
            | Error::Malformed(_)
            | Error::Json(_)
            | Error::Io(_) => 2,
            Error::Precondition(_) | Error::RootFinding(_) | Error::NotConvex(_) | Error::Certification(_) => 3,
            Error::AtomExplosion { .. } | Error::SizeCap { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
