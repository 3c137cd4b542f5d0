use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDim(usize),

    #[error("matrix is not Hermitian (max |A - A^dagger| = {0:.3e}); use the tunneling evolution for non-Hermitian generators")]
    NotHermitian(f64),

    #[error("generator has gain: anti-Hermitian part has positive eigenvalue {0:.3e}")]
    Gain(f64),

    #[error("degenerate projection at step {step}: surviving norm {norm:.3e} (certain leakage)")]
    DegenerateProjection { step: usize, norm: f64 },

    #[error("entangling time diverges for g = g_tilde = {0}")]
    DivergentTime(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 1 config, 2 runtime/physics, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
