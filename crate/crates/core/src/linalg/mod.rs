//! Dense complex linear algebra: storage, LU solves, the non-Hermitian
//! eigensolver and spectral-norm estimation.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{eig, schur, EigenSystem, Schur};
pub use lu::Lu;
pub use matrix::CMatrix;
pub(crate) use matrix::{inner, normalize, vec_norm};
