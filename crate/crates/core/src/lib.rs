//! Spectral computations for one-dimensional periodic Dirac operators
//! `L y = iJ y' + v y` on `[0, π]` with `J = diag(1, -1)` and an off-diagonal
//! potential `v = [[0, P], [Q, 0]]` given by finite Fourier series.
//!
//! The crate covers Fourier–Galerkin spectra, monodromy-based characteristic
//! functions, the Lyapunov–Schmidt coefficient series `α_n`, `β_n^±`, the
//! scalar basic equation near each integer `n`, Riesz projections and
//! eigenvector overlap diagnostics, and closed-form asymptotics for the
//! two-mode example potential.
//!
//! Everything here is `no_std` with `alloc`; IO lives in the companion CLI crate.
#![no_std]

extern crate alloc;

mod error;
mod float;
pub mod linalg;
pub mod logcomplex;

pub mod asymptotics;
pub mod basic_equation;
pub mod coefficients;
pub mod galerkin;
pub mod monodromy;
pub mod potentials;
pub mod riesz;

pub use error::Error;
pub use logcomplex::LogComplex;
pub use potentials::FourierPotential;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// Boundary conditions on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BoundaryCondition {
    /// `y(π) = y(0)`; eigenvalues cluster near even integers.
    #[cfg_attr(feature = "serde", serde(rename = "per+"))]
    PerPlus,
    /// `y(π) = -y(0)`; eigenvalues cluster near odd integers.
    #[cfg_attr(feature = "serde", serde(rename = "per-"))]
    PerMinus,
    /// `y1(0) = y2(0)`, `y1(π) = y2(π)`; one eigenvalue near every integer.
    #[cfg_attr(feature = "serde", serde(rename = "dir"))]
    Dirichlet,
}

impl BoundaryCondition {
    /// Whether the disc around `n` carries eigenvalues for this condition.
    pub fn admits(self, n: i64) -> bool {
        match self {
            Self::PerPlus => n.rem_euclid(2) == 0,
            Self::PerMinus => n.rem_euclid(2) == 1,
            Self::Dirichlet => true,
        }
    }

    /// The periodic condition whose spectrum sits near `n`.
    pub fn periodic_for(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Self::PerPlus
        } else {
            Self::PerMinus
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PerPlus => "per+",
            Self::PerMinus => "per-",
            Self::Dirichlet => "dir",
        }
    }
}

impl core::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "per+" | "per-plus" | "periodic" => Ok(Self::PerPlus),
            "per-" | "per-minus" | "antiperiodic" => Ok(Self::PerMinus),
            "dir" | "dirichlet" => Ok(Self::Dirichlet),
            _ => Err(Error::InvalidArgument("boundary condition must be per+, per- or dir")),
        }
    }
}

impl core::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}
