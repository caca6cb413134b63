use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigErrors;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("oscillator space needs at least 2 Fock levels, got {0}")]
    InvalidSpace(usize),

    #[error(
        "Fock truncation dim={dim} too small for |alpha|={alpha_abs}: \
         tail mass {tail:.3e} >= 1e-12, need dim >= {needed}"
    )]
    TruncationTooSmall {
        dim: usize,
        alpha_abs: f64,
        tail: f64,
        needed: usize,
    },

    #[error(
        "leakage guard tripped: population {population:.3e} in the top Fock levels \
         of dim={dim}; retry with dim >= {suggested}"
    )]
    Leakage {
        population: f64,
        dim: usize,
        suggested: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operator is not Hermitian: max |M - M^H| = {0:.3e}")]
    NotHermitian(f64),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("qubit coherence undefined for c0*c1 = 0")]
    UndefinedCoherence,

    #[error("no quantum jumps without qubit-oscillator coupling (g = 0)")]
    NoJump,

    #[error("grid spacing dt={dt:.4e} violates the sampling limit {limit:.4e}")]
    Sampling { dt: f64, limit: f64 },

    #[error("trace spans {span:.4e}, need at least {needed:.4e}")]
    TraceTooShort { span: f64, needed: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Config(#[from] ConfigErrors),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 numeric/regime/I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 3,
        }
    }
}
