use thiserror::Error;

/// Failures surfaced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode index {0} is odd; potential coefficients live on even indices")]
    OddIndex(i64),
    #[error("coefficient at mode {0} is not finite")]
    NonFinite(i64),
    #[error("truncation K = {k} is too small, need at least {min}")]
    TruncationTooSmall { k: i64, min: i64 },
    #[error("boundary condition {0} has no Fourier-Galerkin representation here")]
    UnsupportedBoundary(crate::BoundaryCondition),
    #[error("QR iteration failed to converge at eigenvalue index {0}")]
    NoConvergence(usize),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("disc around n = {n} holds {found} eigenvalues instead of 2")]
    Localization { n: i64, found: usize },
    #[error("index {n} is outside the trusted range |n| <= {limit}")]
    Untrusted { n: i64, limit: i64 },
    #[error("step size underflow at x = {x}")]
    Integration { x: f64 },
    #[error("no characteristic root found in the disc around n = {0}")]
    RootNotFound(i64),
    #[error("square-root branch lost: {0}")]
    Branch(&'static str),
    #[error("basic equation solver failed for n = {0}")]
    Solver(i64),
    #[error("eigenvalue too close to every admissible contour around n = {0}")]
    Contour(i64),
    #[error("missing spectral data for n = {0:?}")]
    MissingData(alloc::vec::Vec<i64>),
    #[error("weight undefined at index {0}")]
    WeightUndefined(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
