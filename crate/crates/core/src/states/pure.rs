use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use crate::error::{validation, Result};
use crate::linalg::{vec_norm, ComplexMatrix, ONE, ZERO};

/// Unit-norm amplitude vector over the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Normalises a nonzero amplitude vector.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return validation("state vector is empty");
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return validation("state vector contains non-finite amplitudes");
        }
        let n = vec_norm(&amplitudes);
        if n == 0.0 {
            return validation("cannot normalise the zero vector");
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[index] = ONE;
        Self { amplitudes: a }
    }

    /// Maximally coherent state `Σ_i |i⟩/√d`.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub(crate) fn from_normalized(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|ψ|²` per basis element.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }

    /// `|self⟩ ⊗ |other⟩` with `self` as the leading (row) factor.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self { amplitudes: amps }
    }
}

impl TryFrom<Vec<Complex64>> for PureState {
    type Error = crate::Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PureState> for Vec<Complex64> {
    fn from(s: PureState) -> Self {
        s.amplitudes
    }
}

/// Normalised copy of `amps`.
pub fn make_pure(amps: &[Complex64]) -> Result<PureState> {
    PureState::new(amps.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises() {
        let s = PureState::from_real(&[3.0, 3.0]).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn basis_vector_unchanged() {
        let s = PureState::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s, PureState::basis(3, 0));
    }

    #[test]
    fn complex_normalisation() {
        let s = make_pure(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!((s.amplitudes()[0] - Complex64::new(0.6, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - Complex64::new(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(PureState::from_real(&[0.0, 0.0]).is_err());
        assert!(PureState::new(vec![]).is_err());
    }
}
