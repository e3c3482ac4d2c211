use std::path::PathBuf;
use thiserror::Error;

/// Errors surfaced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("grid size {got} does not match the lattice collocation grid {want}")]
    GridMismatch { want: usize, got: usize },

    #[error("field has a nonzero mean (|mean| = {mean:.3e}); mean-zero fields are required")]
    NonzeroMean { mean: f64 },

    #[error("field violates Hermitian symmetry (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("index s = {s} outside the admissible range {range}")]
    InadmissibleIndex { s: f64, range: &'static str },

    #[error("integral diverges at s = {s}: {reason}")]
    DivergentIntegral { s: f64, reason: &'static str },

    #[error("mode-count guard exceeded: {modes} retained modes > {limit}")]
    GuardExceeded { modes: usize, limit: usize },

    #[error("CFL guard violated at t = {t:.6}: dt*max|u|*2*pi*N = {cfl:.4} > 0.5")]
    CflViolation { t: f64, cfl: f64 },

    #[error("solution lost finiteness; last valid time t = {t:.6}")]
    BlowUp { t: f64 },

    #[error("not enough trajectory samples: have {have}, need at least {need}")]
    TooFewSamples { have: usize, need: usize },

    #[error("snapshot format error at line {line}: {msg}")]
    SnapshotFormat { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
