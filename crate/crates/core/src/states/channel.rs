use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::pure::PureState;
use super::random::{complex_gaussian, rng_from_seed};
use crate::error::{argument, validation, Result};
use crate::linalg::{vec_norm, ComplexMatrix};

/// Tolerance on `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Branches with probability at or below this are dropped from selective
/// outcomes.
pub const BRANCH_CUTOFF: f64 = 1e-14;

/// Incoherent quantum operation given by Kraus operators of the form
/// `K_n = Σ_i c_n^i |s_n(i)⟩⟨i|`: every column has at most one nonzero
/// entry, so basis states are mapped to (multiples of) basis states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncoherentChannel {
    kraus: Vec<ComplexMatrix>,
}

impl IncoherentChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = match kraus.first() {
            Some(k) => k,
            None => return validation("channel needs at least one Kraus operator"),
        };
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus
            .iter()
            .any(|k| k.rows() != out_dim || k.cols() != in_dim)
        {
            return validation("Kraus operators have inconsistent shapes");
        }
        for (n, k) in kraus.iter().enumerate() {
            for j in 0..in_dim {
                let nonzero = (0..out_dim).filter(|&i| k[(i, j)].norm() > 0.0).count();
                if nonzero > 1 {
                    return validation(format!(
                        "Kraus operator {n} maps basis state {j} to a superposition; not incoherent"
                    ));
                }
            }
        }
        let ch = Self { kraus };
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return validation(format!(
                "Kraus operators are not complete (residual {residual:.3e})"
            ));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.kraus[0].cols()
    }

    pub fn out_dim(&self) -> usize {
        self.kraus[0].rows()
    }

    /// `‖Σ K†K − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.in_dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        (&acc - &ComplexMatrix::identity(d)).frobenius_norm()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.in_dim() {
            return argument(format!(
                "channel acts on dimension {}, state has dimension {d}",
                self.in_dim()
            ));
        }
        Ok(())
    }

    /// `Λ[ρ] = Σ_n K_n ρ K_n†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let mut out = ComplexMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.kraus {
            out = &out + &(&(k * rho.matrix()) * &k.adjoint());
        }
        DensityMatrix::from_unnormalized(out)
    }

    /// Selective outcomes `(p_n, K_n ρ K_n† / p_n)`; zero-probability
    /// branches are omitted.
    pub fn apply_selective(&self, rho: &DensityMatrix) -> Result<Vec<(f64, DensityMatrix)>> {
        self.check_dim(rho.dim())?;
        let mut branches = Vec::new();
        for k in &self.kraus {
            let m = &(k * rho.matrix()) * &k.adjoint();
            let p = m.trace().re;
            if p > BRANCH_CUTOFF {
                branches.push((p, DensityMatrix::from_unnormalized(m)?));
            }
        }
        Ok(branches)
    }

    /// Selective outcomes on a pure input: `(p_n, K_n ψ / √p_n)`.
    pub fn apply_pure(&self, psi: &PureState) -> Result<Vec<(f64, PureState)>> {
        self.check_dim(psi.dim())?;
        let mut branches = Vec::new();
        for k in &self.kraus {
            let v = k.matvec(psi.amplitudes());
            let n = vec_norm(&v);
            if n * n > BRANCH_CUTOFF {
                branches.push((
                    n * n,
                    PureState::from_normalized(v.into_iter().map(|z| z / n).collect()),
                ));
            }
        }
        Ok(branches)
    }
}

/// Random incoherent channel on dimension `d` with `n_kraus` operators.
///
/// Each `K_n` uses a uniformly random permutation `s_n` of the basis and
/// coefficients `c_n^i` such that `(c_1^i, ..., c_N^i)` is a uniformly random
/// unit vector for every `i`. Since `s_n` is injective the cross terms of
/// `Σ_n K_n†K_n` vanish and completeness reduces to unit columns.
pub fn random_incoherent_channel(d: usize, n_kraus: usize, seed: u64) -> Result<IncoherentChannel> {
    if d == 0 || n_kraus == 0 {
        return argument("channel needs d >= 1 and at least one Kraus operator");
    }
    let mut rng = rng_from_seed(seed);
    let perms: Vec<Vec<usize>> = (0..n_kraus)
        .map(|_| {
            let mut p: Vec<usize> = (0..d).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let mut kraus = vec![ComplexMatrix::zeros(d, d); n_kraus];
    for i in 0..d {
        let mut coeffs: Vec<Complex64> = (0..n_kraus).map(|_| complex_gaussian(&mut rng)).collect();
        let norm = vec_norm(&coeffs);
        coeffs.iter_mut().for_each(|c| *c /= norm);
        for n in 0..n_kraus {
            kraus[n][(perms[n][i], i)] = coeffs[n];
        }
    }
    IncoherentChannel::new(kraus)
}
