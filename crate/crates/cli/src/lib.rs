//! File formats, scripted studies and the command-line front end for `dirac-core`.

pub mod commands;
pub mod error;
pub mod experiments;
pub mod output;
pub mod pipeline;
pub mod potential_file;

pub use error::CliError;

/// Environment variable holding the worker thread count for per-`n` work.
pub const THREADS_ENV: &str = "DIRAC_SPECTRA_THREADS";

/// Sizes the global worker pool from [`THREADS_ENV`]; unset means one worker per core.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}
