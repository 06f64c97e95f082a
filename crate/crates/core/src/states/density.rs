use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pure::PureState;
use crate::error::{validation, Result};
use crate::linalg::{eigh_unchecked, ComplexMatrix, HermitianEigen};

/// Admission tolerance for Hermiticity, trace and negative eigenvalues.
pub const DENSITY_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` as a density matrix. Eigenvalues in `[-1e-10, 0)` are
    /// clamped to zero and the trace renormalised.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return validation(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            ));
        }
        if !m.is_finite() {
            return validation("density matrix contains non-finite entries");
        }
        let defect = m.hermitian_defect();
        if defect > DENSITY_TOL {
            return validation(format!("matrix is not Hermitian (defect {defect:.3e})"));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return validation(format!("trace {:.12} is not 1", tr.re));
        }
        Self::admit(m.hermitian_part())
    }

    /// Normalises a nonzero PSD matrix to unit trace (channel outputs,
    /// selective branches).
    pub(crate) fn from_unnormalized(m: ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return validation("cannot normalise a matrix with nonpositive trace");
        }
        Self::admit(m.hermitian_part().scale_real(1.0 / tr))
    }

    fn admit(h: ComplexMatrix) -> Result<Self> {
        let e = eigh_unchecked(&h);
        let min = e.values.last().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return validation(format!(
                "matrix is not positive semidefinite (eigenvalue {min:.3e})"
            ));
        }
        if min < 0.0 {
            let clamped = e.reconstruct_with(|x| x.max(0.0));
            let tr = clamped.trace().re;
            return Ok(Self {
                matrix: clamped.hermitian_part().scale_real(1.0 / tr),
            });
        }
        Ok(Self { matrix: h })
    }

    /// Wraps a matrix known to be a density matrix by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Incoherent state `Σ p_i |i⟩⟨i|`.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag_real(probabilities))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh_unchecked(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().values.iter().filter(|&&x| x > tol).count()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    /// The dominant eigenvector when the state is pure within `tol`.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        let e = self.eigen();
        if e.values.iter().skip(1).all(|&x| x.abs() <= tol) && (e.values[0] - 1.0).abs() <= tol {
            Some(PureState::from_normalized(e.vector(0)))
        } else {
            None
        }
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = crate::Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

/// Convex decomposition `ρ = Σ_a p_a |ψ_a⟩⟨ψ_a|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return validation("decomposition needs one positive weight per state");
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return validation("decomposition weights must be positive");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return validation(format!("weights sum to {total}, not 1"));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return validation("decomposition states have mismatched dimensions");
        }
        Ok(Self { weights, states })
    }

    pub fn single(state: PureState) -> Self {
        Self {
            weights: vec![1.0],
            states: vec![state],
        }
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(self.states.iter())
    }

    /// `Σ_a p_a E(ψ_a)`.
    pub fn average(&self, mut measure: impl FnMut(&PureState) -> f64) -> f64 {
        self.iter().map(|(p, s)| p * measure(s)).sum()
    }

    pub(crate) fn unnormalized_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, s) in self.iter() {
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += a[i] * a[j].conj() * p;
                }
            }
        }
        m
    }
}

/// `Σ_a p_a |ψ_a⟩⟨ψ_a|`.
pub fn density_from(dec: &Decomposition) -> Result<DensityMatrix> {
    DensityMatrix::new(dec.unnormalized_matrix())
}
