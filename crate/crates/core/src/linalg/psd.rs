use super::eigh::{eigh, eigh_unchecked};
use super::matrix::ComplexMatrix;
use crate::error::Result;

/// Frobenius-nearest positive semidefinite matrix to a Hermitian `h`:
/// negative eigenvalues are clamped to zero.
pub fn psd_project(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(h)?;
    Ok(e.reconstruct_with(|x| x.max(0.0)))
}

/// Projection without the Hermiticity check; callers guarantee a Hermitian
/// argument (solver inner loops).
pub(crate) fn psd_project_unchecked(h: &ComplexMatrix) -> ComplexMatrix {
    match h.rows() {
        0 => h.clone(),
        1 => ComplexMatrix::diag_real(&[h[(0, 0)].re.max(0.0)]),
        _ => eigh_unchecked(h).reconstruct_with(|x| x.max(0.0)),
    }
}
