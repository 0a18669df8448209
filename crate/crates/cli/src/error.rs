use dirac_core::Error;
use thiserror::Error;

use crate::potential_file::SpecError;

/// Exit code for usage, parse and IO errors.
pub const EXIT_USAGE: u8 = 1;
/// Exit code for localization, convergence and failed cross-checks.
pub const EXIT_NUMERICAL: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("invalid experiment config {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("cross-checks failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(e) if !is_numerical(e) => EXIT_USAGE,
            Self::Core(_) | Self::CheckFailed(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

/// Errors caused by the computation rather than by the request.
pub fn is_numerical(e: &Error) -> bool {
    !matches!(
        e,
        Error::OddIndex(_)
            | Error::NonFinite(_)
            | Error::InvalidArgument(_)
            | Error::UnsupportedBoundary(_)
            | Error::TruncationTooSmall { .. }
            | Error::Untrusted { .. }
            | Error::WeightUndefined(_)
    )
}
