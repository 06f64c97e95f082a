//! Schmidt decomposition and the k-concurrence family of bipartite states.
//!
//! A pure state `Σ_{ij} ψ_ij |i⟩|j⟩` on `d ⊗ d` is stored as its amplitude
//! matrix `Ψ`. With Schmidt coefficients `λ` (squared singular values of `Ψ`)
//!
//! ```text
//! C_k(ψ) = [ S_k(λ) / S_k(1/d, ..., 1/d) ]^(1/k) = d [ S_k(λ) / C(d, k) ]^(1/k)
//! ```
//!
//! and `G_d = C_d` is `d` times the geometric mean of `λ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{argument, validation, Result};
use crate::linalg::{
    binomial, compound_matrix, elementary_symmetric, elementary_symmetric_without, svd,
    ComplexMatrix, ZERO,
};
use crate::roof::{convex_roof, PureMeasure, RoofEstimate, RoofOptions};
use crate::states::{Decomposition, DensityMatrix, PureState};

/// Values at or below this count as zero concurrence.
pub const ZERO_THRESHOLD: f64 = 1e-7;
/// Default cutoff for counting nonzero Schmidt coefficients.
pub const SCHMIDT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitePure {
    dim: usize,
    psi: ComplexMatrix,
}

impl BipartitePure {
    pub fn new(psi: ComplexMatrix) -> Result<Self> {
        if !psi.is_square() || psi.rows() == 0 {
            return validation("bipartite amplitude matrix must be square and nonempty");
        }
        if !psi.is_finite() {
            return validation("bipartite amplitude matrix has non-finite entries");
        }
        let n = psi.frobenius_norm();
        if (n - 1.0).abs() > 1e-10 {
            return validation(format!("bipartite state has norm {n}, expected 1"));
        }
        Ok(Self {
            dim: psi.rows(),
            psi,
        })
    }

    /// Reshapes a `d²`-dimensional pure state, `|i⟩|j⟩ -> i d + j`.
    pub fn from_state(state: &PureState) -> Result<Self> {
        let d = square_root_dim(state.dim())?;
        let psi = ComplexMatrix::from_vec(d, d, state.amplitudes().to_vec())?;
        Ok(Self { dim: d, psi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.psi
    }

    pub fn to_state(&self) -> PureState {
        PureState::from_normalized(self.psi.as_slice().to_vec())
    }
}

pub(crate) fn square_root_dim(n: usize) -> Result<usize> {
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || d == 0 {
        return validation(format!("dimension {n} is not a perfect square d x d"));
    }
    Ok(d)
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if k < 2 || k > d {
        return argument(format!("k must satisfy 2 <= k <= d = {d} (got {k})"));
    }
    Ok(())
}

/// Schmidt coefficients in descending order, summing to one.
pub fn schmidt_coeffs(psi: &BipartitePure) -> Vec<f64> {
    let s = svd(&psi.psi).expect("validated finite matrix");
    s.values.iter().map(|x| x * x).collect()
}

pub fn schmidt_rank(psi: &BipartitePure, tol: f64) -> usize {
    schmidt_coeffs(psi).into_iter().filter(|&l| l > tol).count()
}

/// `C_k` from a Schmidt vector of length `d`.
pub fn k_concurrence_from_schmidt(lambda: &[f64], k: usize) -> Result<f64> {
    let d = lambda.len();
    check_k(d, k)?;
    let s = elementary_symmetric(lambda, k)?;
    Ok(d as f64 * (s.max(0.0) / binomial(d, k)).powf(1.0 / k as f64))
}

pub fn k_concurrence_pure(psi: &BipartitePure, k: usize) -> Result<f64> {
    check_k(psi.dim, k)?;
    k_concurrence_from_schmidt(&schmidt_coeffs(psi), k)
}

/// `C_k = d [tr K_k(Ψ†Ψ) / C(d, k)]^(1/k)` evaluated from minors, without
/// singular values.
pub fn k_concurrence_via_compound(psi: &BipartitePure, k: usize) -> Result<f64> {
    let d = psi.dim;
    check_k(d, k)?;
    let gram = psi.psi.adjoint().matmul(&psi.psi);
    let t = compound_matrix(&gram, k)?.trace().re;
    Ok(d as f64 * (t.max(0.0) / binomial(d, k)).powf(1.0 / k as f64))
}

/// `G_d = C_d`.
pub fn g_concurrence_pure(psi: &BipartitePure) -> f64 {
    let d = psi.dim;
    if d == 1 {
        return 1.0;
    }
    let lambda = schmidt_coeffs(psi);
    if lambda.iter().any(|&l| l <= 0.0) {
        return 0.0;
    }
    let mean_log = lambda.iter().map(|l| l.ln()).sum::<f64>() / d as f64;
    d as f64 * mean_log.exp()
}

/// Weighted `C_k` on unnormalised `d²` vectors, for convex roofs.
#[derive(Debug, Clone, Copy)]
pub struct KConcurrence {
    d: usize,
    k: usize,
    scale: f64,
}

impl KConcurrence {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        check_k(d, k)?;
        Ok(Self {
            d,
            k,
            scale: d as f64 / binomial(d, k).powf(1.0 / k as f64),
        })
    }

    fn matrix(&self, v: &[Complex64]) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.d, self.d, v.to_vec()).expect("vector of length d²")
    }
}

impl PureMeasure for KConcurrence {
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let s = svd(&self.matrix(v)).expect("finite");
        let lambda: Vec<f64> = s.values.iter().map(|x| x * x).collect();
        let sk = elementary_symmetric(&lambda, self.k)
            .expect("k checked")
            .max(0.0);
        self.scale * sk.powf(1.0 / self.k as f64)
    }

    fn gradient(&self, v: &[Complex64]) -> Vec<Complex64> {
        let s = svd(&self.matrix(v)).expect("finite");
        let lambda: Vec<f64> = s.values.iter().map(|x| x * x).collect();
        let sk = elementary_symmetric(&lambda, self.k).expect("k checked");
        let total: f64 = lambda.iter().sum();
        if sk <= 1e-300 || sk <= 1e-24 * total.powi(self.k as i32) {
            return vec![ZERO; v.len()];
        }
        let kf = self.k as f64;
        let outer = self.scale / kf * sk.powf(1.0 / kf - 1.0);
        let d = self.d;
        let mut g = vec![ZERO; d * d];
        for i in 0..d {
            let c = outer * 2.0 * s.values[i] * elementary_symmetric_without(&lambda, i, self.k);
            if c == 0.0 {
                continue;
            }
            for a in 0..d {
                let x = s.left[(a, i)] * c;
                for b in 0..d {
                    g[a * d + b] += x * s.right[(b, i)].conj();
                }
            }
        }
        g
    }
}

/// Convex-roof estimate (upper bound) of `C_k` for a state on `d ⊗ d`.
pub fn k_concurrence_mixed(
    rho: &DensityMatrix,
    k: usize,
    opts: &RoofOptions,
) -> Result<RoofEstimate> {
    k_concurrence_mixed_seeded(rho, k, opts, &[])
}

pub fn k_concurrence_mixed_seeded(
    rho: &DensityMatrix,
    k: usize,
    opts: &RoofOptions,
    seeds: &[Decomposition],
) -> Result<RoofEstimate> {
    let d = square_root_dim(rho.dim())?;
    let measure = KConcurrence::new(d, k)?;
    convex_roof(rho, &measure, opts, seeds)
}

/// All `C_k` of a pure state together with its Schmidt vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcurrenceReport {
    pub k_values: BTreeMap<usize, f64>,
    pub schmidt_coeffs: Vec<f64>,
    pub schmidt_rank: usize,
    /// `C_2 ≥ C_3 ≥ ... ≥ C_d` within `1e-10`.
    pub chain_ok: bool,
}

pub fn maclaurin_chain(psi: &BipartitePure) -> ConcurrenceReport {
    let lambda = schmidt_coeffs(psi);
    let d = psi.dim;
    let k_values: BTreeMap<usize, f64> = (2..=d)
        .map(|k| {
            (
                k,
                k_concurrence_from_schmidt(&lambda, k).expect("k in range"),
            )
        })
        .collect();
    let vals: Vec<f64> = k_values.values().copied().collect();
    let chain_ok = vals.windows(2).all(|w| w[1] <= w[0] + 1e-10);
    let schmidt_rank = lambda.iter().filter(|&&l| l > SCHMIDT_TOL).count();
    ConcurrenceReport {
        k_values,
        schmidt_coeffs: lambda,
        schmidt_rank,
        chain_ok,
    }
}
