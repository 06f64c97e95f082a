//! Small dense complex linear algebra: SVD, Hermitian eigensolver, compound
//! matrices, elementary symmetric polynomials and PSD projection.
//!
//! Everything here is written for the matrix sizes the rest of the crate
//! needs (dimension up to a few dozen) and favours accuracy over speed.

mod compound;
mod eigh;
mod matrix;
mod psd;
mod svd;
mod symmetric;

pub use compound::{binomial, compound_matrix, index_subsets};
pub use eigh::{eigh, HermitianEigen};
pub use matrix::{inner, vec_norm, ComplexMatrix};
pub use psd::psd_project;
pub use svd::{singular_values, svd, SpectrumResult};
pub use symmetric::{elementary_symmetric, elementary_symmetric_recurrence};

pub(crate) use eigh::{eigh_unchecked, expi_hermitian};
pub(crate) use matrix::{ONE, ZERO};
pub(crate) use psd::psd_project_unchecked;
pub(crate) use svd::complete_orthonormal;
pub(crate) use symmetric::elementary_symmetric_without;

/// Default absolute tolerance for structural checks.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Default relative tolerance for numerical agreement.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
