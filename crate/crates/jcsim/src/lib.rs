//! Scenario driver around [`jc_core`]: configures canonical cavity-QED
//! experiments, runs them deterministically, and emits machine-readable
//! time-series tables plus a structured JSON summary.
//!
//! The binary front-end (`jcsim`) is a thin wrapper over this library:
//! [`config`] merges CLI flags, config files, the environment, and per-
//! scenario defaults into a validated [`config::ResolvedRun`]; [`scenario`]
//! executes it; [`output`] serializes the results.

pub mod config;
pub mod output;
pub mod presets;
pub mod scenario;

/// Process exit code for success.
pub const EXIT_OK: i32 = 0;
/// Process exit code for I/O failures (unreadable config, unwritable output).
pub const EXIT_IO: i32 = 1;
/// Process exit code for configuration errors (parse/validation).
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for numeric/regime errors (truncation, unsupported
/// parameter regimes, impossible measurement outcomes).
pub const EXIT_REGIME: i32 = 3;

/// Driver-level error, split by how the process should exit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad configuration: unknown keys, unparsable documents, out-of-range
    /// or missing parameters.
    #[error("config error: {0}")]
    Config(String),
    /// The requested parameters fall outside the regime the closed forms
    /// (or the truncated space) can honestly represent.
    #[error("regime error: {0}")]
    Regime(String),
    /// Filesystem trouble reading inputs or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => EXIT_CONFIG,
            Error::Regime(_) => EXIT_REGIME,
            Error::Io(_) => EXIT_IO,
        }
    }
}

impl From<jc_core::Error> for Error {
    fn from(e: jc_core::Error) -> Self {
        match e {
            jc_core::Error::UnsupportedRegime(_)
            | jc_core::Error::Truncation { .. }
            | jc_core::Error::TruncationEdge { .. }
            | jc_core::Error::ImpossibleOutcome { .. } => Error::Regime(e.to_string()),
            _ => Error::Config(e.to_string()),
        }
    }
}

/// Driver-level result alias.
pub type Result<T> = std::result::Result<T, Error>;
