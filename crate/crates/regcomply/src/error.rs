use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid value for an argument (non-positive weight, zero vector, ...).
    Domain(String),
    /// Vector length does not match the ambient dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// Cone generators are (numerically) coplanar.
    DegenerateCone(String),
    /// An enumeration or grid budget guard was exceeded.
    Capacity(String),
    /// An iterative routine failed to converge.
    Numerical(String),
    /// Invalid run configuration (CLI / config file).
    Config(String),
    /// Filesystem error while reading or writing results.
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numerical, 4 budget guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::DimensionMismatch { .. } | Error::Config(_) => 2,
            Error::DegenerateCone(_) | Error::Numerical(_) | Error::Io(_) => 3,
            Error::Capacity(_) => 4,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegenerateCone(msg) => write!(f, "degenerate cone: {msg}"),
            Error::Capacity(msg) => write!(f, "budget guard: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
