//! Coherence monotones in the computational basis.
//!
//! Pure states: coherence rank, the coherence concurrence
//! `C_c = 2 Σ_{j<k} |ψ_j ψ_k|`, `C_c^(N) = N |ψ_1² ... ψ_N²|^(1/N)`, the
//! `l1` norm and the relative entropy of coherence. Mixed states: the
//! coherence number via [`coherence_number`] and convex-roof estimates of
//! `C_c` and `C_c^(N)`.
//!
//! [`cck_pure_analog`] is an extension: `N [S_k(|ψ_i|²) / C(N, k)]^(1/k)`,
//! which coincides with `C_c^(N)` at `k = N`.

mod number;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use number::{
    certificate_decomposition, coherence_number, coherence_number_bounds, feasible_at,
    CoherenceNumber, FeasibilityCertificate, FeasibilityOptions, SubsetPart, MAX_EXACT_DIM,
};

use crate::error::{argument, Result};
use crate::linalg::{binomial, elementary_symmetric, elementary_symmetric_without, ZERO};
use crate::roof::{convex_roof, PureMeasure, RoofEstimate, RoofOptions};
use crate::states::{Decomposition, DensityMatrix, PureState, StateInput};

/// Amplitudes with modulus at or below this count as zero.
pub const RANK_TOL: f64 = 1e-10;

pub fn coherence_rank(psi: &PureState, tol: f64) -> usize {
    psi.amplitudes()
        .iter()
        .filter(|z| z.norm() > tol)
        .count()
        .max(1)
}

/// Weighted coherence concurrence `(Σ|v_i|)² − Σ|v_i|²`.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceConcurrence;

impl PureMeasure for CoherenceConcurrence {
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let s: f64 = v.iter().map(|z| z.norm()).sum();
        let q: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (s * s - q).max(0.0)
    }

    fn gradient(&self, v: &[Complex64]) -> Vec<Complex64> {
        let s: f64 = v.iter().map(|z| z.norm()).sum();
        v.iter()
            .map(|z| {
                let r = z.norm();
                if r == 0.0 {
                    ZERO
                } else {
                    z * (2.0 * (s - r) / r)
                }
            })
            .collect()
    }
}

/// Weighted `C_c^(N)`: `N (Π |v_i|²)^(1/N)`.
#[derive(Debug, Clone, Copy)]
pub struct FullCoherenceConcurrence;

impl PureMeasure for FullCoherenceConcurrence {
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let n = v.len() as f64;
        if v.iter().any(|z| z.norm_sqr() == 0.0) {
            return 0.0;
        }
        let mean_log = v.iter().map(|z| z.norm_sqr().ln()).sum::<f64>() / n;
        n * mean_log.exp()
    }

    fn gradient(&self, v: &[Complex64]) -> Vec<Complex64> {
        let g = self.weighted(v);
        if g == 0.0 {
            return vec![ZERO; v.len()];
        }
        let c = 2.0 * g / v.len() as f64;
        v.iter().map(|z| z * (c / z.norm_sqr())).collect()
    }
}

/// Weighted S_k analog `N (S_k(|v|²)/C(N,k))^(1/k)`.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceKAnalog {
    k: usize,
    scale: f64,
}

impl CoherenceKAnalog {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 2 || k > n {
            return argument(format!("k must satisfy 2 <= k <= {n} (got {k})"));
        }
        Ok(Self {
            k,
            scale: n as f64 / binomial(n, k).powf(1.0 / k as f64),
        })
    }
}

impl PureMeasure for CoherenceKAnalog {
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let p: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let s = elementary_symmetric(&p, self.k)
            .expect("k checked")
            .max(0.0);
        self.scale * s.powf(1.0 / self.k as f64)
    }

    fn gradient(&self, v: &[Complex64]) -> Vec<Complex64> {
        let p: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let s = elementary_symmetric(&p, self.k).expect("k checked");
        if s <= 1e-300 {
            return vec![ZERO; v.len()];
        }
        let kf = self.k as f64;
        let outer = self.scale / kf * s.powf(1.0 / kf - 1.0);
        v.iter()
            .enumerate()
            .map(|(i, z)| z * (2.0 * outer * elementary_symmetric_without(&p, i, self.k)))
            .collect()
    }
}

pub fn coherence_concurrence_pure(psi: &PureState) -> f64 {
    CoherenceConcurrence.value(psi)
}

#[allow(non_snake_case)]
pub fn ccN_pure(psi: &PureState) -> f64 {
    FullCoherenceConcurrence.value(psi)
}

/// Extension: `[S_k(|ψ_i|²) / S_k(1/N, ..., 1/N)]^(1/k)`.
pub fn cck_pure_analog(psi: &PureState, k: usize) -> Result<f64> {
    Ok(CoherenceKAnalog::new(psi.dim(), k)?.value(psi))
}

/// `Σ_{i≠j} |ψ_i ψ_j| = (Σ|ψ_i|)² − 1`.
pub fn l1_coherence_pure(psi: &PureState) -> f64 {
    coherence_concurrence_pure(psi)
}

/// Shannon entropy (bits) of the basis distribution; `S(ρ) = 0` for pure
/// states.
pub fn relative_entropy_pure(psi: &PureState) -> f64 {
    shannon_bits(&psi.probabilities())
}

fn shannon_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    rho.matrix().off_diagonal_l1()
}

/// `S(diag ρ) − S(ρ)` in bits.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let diag: Vec<f64> = (0..d).map(|i| rho.entry(i, i).re.max(0.0)).collect();
    let eig = rho.eigen();
    let spec: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    (shannon_bits(&diag) - shannon_bits(&spec)).max(0.0)
}

/// Upper-bound estimate of the convex roof of `C_c`.
pub fn cc_mixed(rho: &DensityMatrix, opts: &RoofOptions) -> Result<RoofEstimate> {
    convex_roof(rho, &CoherenceConcurrence, opts, &[])
}

pub fn cc_mixed_seeded(
    rho: &DensityMatrix,
    opts: &RoofOptions,
    seeds: &[Decomposition],
) -> Result<RoofEstimate> {
    convex_roof(rho, &CoherenceConcurrence, opts, seeds)
}

/// Upper-bound estimate of the convex roof of `C_c^(N)`.
#[allow(non_snake_case)]
pub fn ccN_mixed(rho: &DensityMatrix, opts: &RoofOptions) -> Result<RoofEstimate> {
    convex_roof(rho, &FullCoherenceConcurrence, opts, &[])
}

#[allow(non_snake_case)]
pub fn ccN_mixed_seeded(
    rho: &DensityMatrix,
    opts: &RoofOptions,
    seeds: &[Decomposition],
) -> Result<RoofEstimate> {
    convex_roof(rho, &FullCoherenceConcurrence, opts, seeds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "estimate (upper bound)")]
    UpperBound,
    #[serde(rename = "bounds")]
    Bounds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub dim: usize,
    pub coherence_number: usize,
    pub coherence_number_kind: ValueKind,
    pub coherence_number_bounds: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2_coherence_number: Option<f64>,
    pub cc: f64,
    pub cc_kind: ValueKind,
    #[serde(rename = "ccN")]
    pub ccn: f64,
    #[serde(rename = "ccN_kind")]
    pub ccn_kind: ValueKind,
    pub l1: f64,
    pub rel_entropy: f64,
    /// Extension: the S_k analog for `2 <= k <= d` (pure states only).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub cck_analog_extension: BTreeMap<usize, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FeasibilityCertificate>,
}

pub fn coherence_report(
    state: &StateInput,
    feas: &FeasibilityOptions,
    roof: &RoofOptions,
    log2: bool,
) -> Result<CoherenceReport> {
    let dim = state.dim();
    let report = match state {
        StateInput::Pure(psi) => {
            let rc = coherence_rank(psi, RANK_TOL);
            CoherenceReport {
                dim,
                coherence_number: rc,
                coherence_number_kind: ValueKind::Exact,
                coherence_number_bounds: [rc, rc],
                log2_coherence_number: None,
                cc: coherence_concurrence_pure(psi),
                cc_kind: ValueKind::Exact,
                ccn: ccN_pure(psi),
                ccn_kind: ValueKind::Exact,
                l1: l1_coherence_pure(psi),
                rel_entropy: relative_entropy_pure(psi),
                cck_analog_extension: (2..=dim)
                    .map(|k| (k, cck_pure_analog(psi, k).expect("k in range")))
                    .collect(),
                certificate: None,
            }
        }
        StateInput::Mixed(rho) => {
            let rc = coherence_number(rho, feas)?;
            let seeds: Vec<Decomposition> = rc
                .certificate
                .as_ref()
                .and_then(certificate_decomposition)
                .into_iter()
                .collect();
            let cc = cc_mixed_seeded(rho, roof, &seeds)?;
            let ccn = ccN_mixed_seeded(rho, roof, &seeds)?.value;
            CoherenceReport {
                dim,
                coherence_number: rc.value,
                coherence_number_kind: if rc.exact {
                    ValueKind::Exact
                } else {
                    ValueKind::Bounds
                },
                coherence_number_bounds: [rc.lower, rc.upper],
                log2_coherence_number: None,
                cc: cc.value,
                cc_kind: ValueKind::UpperBound,
                ccn,
                ccn_kind: ValueKind::UpperBound,
                l1: l1_coherence(rho),
                rel_entropy: relative_entropy_coherence(rho),
                cck_analog_extension: BTreeMap::new(),
                certificate: rc.certificate,
            }
        }
    };
    Ok(CoherenceReport {
        log2_coherence_number: log2.then(|| (report.coherence_number as f64).log2()),
        ..report
    })
}
