use thiserror::Error;

/// Errors raised by the solvers and their I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The horizontal gradient (or the radius) vanishes where a direction was requested.
    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("grid error: {0}")]
    Grid(String),

    /// A game stencil left the grid where the field is not yet constant.
    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::Parse(_) => 2,
            Error::Cfl { .. } | Error::DomainTooSmall(_) | Error::Degenerate(_) | Error::Grid(_) => 3,
            Error::Io(_) | Error::Json(_) => 4,
        }
    }
}
