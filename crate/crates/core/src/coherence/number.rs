//! Coherence number of mixed states as a sequence of convex feasibility
//! problems.
//!
//! `r_C(ρ) ≤ k` iff `ρ = Σ_{|S|=k} ρ_S` with every `ρ_S ⪰ 0` supported on the
//! basis subset `S`. Each problem is restricted to the range of `ρ` (any
//! feasible `ρ_S ≤ ρ` lives there), which leaves one PSD block per subset in
//! the coordinates of `range(ρ) ∩ span{|i⟩ : i ∈ S}`. Dykstra's alternating
//! projections between the affine constraint and the product of PSD cones
//! run first; a factored least-squares polish picks up slowly converging
//! boundary cases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coherence_rank;
use crate::error::{argument, Result};
use crate::linalg::{
    eigh_unchecked, index_subsets, psd_project_unchecked, svd, ComplexMatrix, ZERO,
};
use crate::optim::minimize;
use crate::states::{Decomposition, DensityMatrix, PureState};

/// Largest dimension for which subsets are enumerated.
pub const MAX_EXACT_DIM: usize = 8;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    /// Frobenius residual below which a decomposition counts as feasible.
    pub tol: f64,
    pub max_iterations: usize,
    pub polish_iterations: usize,
    /// Eigenvalues of `ρ` above this span its range.
    pub support_tol: f64,
    /// Singular-value cutoff for the subset null spaces.
    pub null_tol: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iterations: 5000,
            polish_iterations: 3000,
            support_tol: 1e-10,
            null_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetPart {
    pub subset: Vec<usize>,
    pub matrix: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityCertificate {
    pub k: usize,
    pub feasible: bool,
    pub parts: Vec<SubsetPart>,
    /// `‖Σ_S ρ_S − ρ‖_F` for the returned parts.
    pub residual: f64,
    pub iterations: usize,
    pub method: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceNumber {
    pub value: usize,
    /// `false` when only bounds were computed (`d > MAX_EXACT_DIM`).
    pub exact: bool,
    pub lower: usize,
    pub upper: usize,
    pub certificate: Option<FeasibilityCertificate>,
    /// Failed attempts below `value`, with their residuals.
    pub rejected: Vec<FeasibilityCertificate>,
}

fn full_certificate(rho: &DensityMatrix) -> FeasibilityCertificate {
    FeasibilityCertificate {
        k: rho.dim(),
        feasible: true,
        parts: vec![SubsetPart {
            subset: (0..rho.dim()).collect(),
            matrix: rho.matrix().clone(),
        }],
        residual: 0.0,
        iterations: 0,
        method: "trivial".into(),
    }
}

fn diagonal_certificate(rho: &DensityMatrix) -> FeasibilityCertificate {
    let d = rho.dim();
    let parts: Vec<SubsetPart> = (0..d)
        .filter(|&i| rho.entry(i, i).re > 0.0)
        .map(|i| {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, i)] = Complex64::new(rho.entry(i, i).re, 0.0);
            SubsetPart {
                subset: vec![i],
                matrix: m,
            }
        })
        .collect();
    let mut cert = FeasibilityCertificate {
        k: 1,
        feasible: true,
        parts,
        residual: 0.0,
        iterations: 0,
        method: "diagonal".into(),
    };
    cert.residual = residual_of(rho, &cert.parts);
    cert
}

fn residual_of(rho: &DensityMatrix, parts: &[SubsetPart]) -> f64 {
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for p in parts {
        acc = &acc + &p.matrix;
    }
    (&acc - rho.matrix()).frobenius_norm()
}

/// Pads `support` with the smallest unused indices up to size `k`.
fn pad_subset(support: &[usize], k: usize, d: usize) -> Vec<usize> {
    let mut s = support.to_vec();
    for i in 0..d {
        if s.len() >= k {
            break;
        }
        if !s.contains(&i) {
            s.push(i);
        }
    }
    s.sort_unstable();
    s
}

fn pure_certificate(
    rho: &DensityMatrix,
    psi: &PureState,
    k: usize,
    tol: f64,
) -> FeasibilityCertificate {
    let d = rho.dim();
    let support: Vec<usize> = (0..d)
        .filter(|&i| psi.amplitudes()[i].norm() > tol)
        .collect();
    let subset = pad_subset(&support, k, d);
    let mut m = rho.matrix().clone();
    for i in 0..d {
        for j in 0..d {
            if !subset.contains(&i) || !subset.contains(&j) {
                m[(i, j)] = ZERO;
            }
        }
    }
    let parts = vec![SubsetPart { subset, matrix: m }];
    let residual = residual_of(rho, &parts);
    FeasibilityCertificate {
        k,
        feasible: true,
        parts,
        residual,
        iterations: 0,
        method: "pure".into(),
    }
}

/// Orthonormal basis (columns) of the Hermitian basis used to flatten `r x r`
/// Hermitian matrices into `R^{r²}`.
fn herm_to_coords(m: &ComplexMatrix) -> Vec<f64> {
    let r = m.rows();
    let s2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(r * r);
    for i in 0..r {
        v.push(m[(i, i)].re);
    }
    for i in 0..r {
        for j in i + 1..r {
            v.push(s2 * m[(i, j)].re);
            v.push(s2 * m[(i, j)].im);
        }
    }
    v
}

fn coords_to_herm(r: usize, v: &[f64]) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(r, r);
    for i in 0..r {
        m[(i, i)] = Complex64::new(v[i], 0.0);
    }
    let mut idx = r;
    for i in 0..r {
        for j in i + 1..r {
            let z = Complex64::new(v[idx] * h, v[idx + 1] * h);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            idx += 2;
        }
    }
    m
}

struct Reduced {
    /// `d x r` orthonormal range basis of `ρ`.
    q: ComplexMatrix,
    /// `Q† ρ Q`.
    target: ComplexMatrix,
    subsets: Vec<Vec<usize>>,
    /// `r x m_S` orthonormal bases, one per retained subset.
    bases: Vec<ComplexMatrix>,
    /// Pseudo-inverse of `Z ↦ Σ_S P_S Z P_S` in Hermitian coordinates.
    gram_pinv: Vec<f64>,
}

impl Reduced {
    fn new(rho: &DensityMatrix, k: usize, opts: &FeasibilityOptions) -> Self {
        let d = rho.dim();
        let eig = rho.eigen();
        let keep: Vec<usize> = (0..d)
            .filter(|&i| eig.values[i] > opts.support_tol)
            .collect();
        let r = keep.len();
        let q = ComplexMatrix::from_fn(d, r, |i, j| eig.vectors[(i, keep[j])]);
        let target =
            ComplexMatrix::diag_real(&keep.iter().map(|&i| eig.values[i]).collect::<Vec<_>>());

        let mut subsets = Vec::new();
        let mut bases = Vec::new();
        for s in index_subsets(d, k) {
            let comp: Vec<usize> = (0..d).filter(|i| !s.contains(i)).collect();
            let basis = if comp.is_empty() {
                ComplexMatrix::identity(r)
            } else {
                let block = q.select(&comp, &(0..r).collect::<Vec<_>>());
                let sv = svd(&block).expect("finite");
                let null: Vec<usize> = (0..r)
                    .filter(|&j| j >= sv.values.len() || sv.values[j] <= opts.null_tol)
                    .collect();
                ComplexMatrix::from_fn(r, null.len(), |i, j| sv.right[(i, null[j])])
            };
            if basis.cols() > 0 {
                subsets.push(s);
                bases.push(basis);
            }
        }

        let n = r * r;
        let projectors: Vec<ComplexMatrix> = bases.iter().map(|b| b.matmul(&b.adjoint())).collect();
        let mut gram = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            let z = coords_to_herm(r, &e);
            let mut acc = ComplexMatrix::zeros(r, r);
            for p in &projectors {
                acc = &acc + &p.matmul(&z).matmul(p);
            }
            for (row, v) in herm_to_coords(&acc).into_iter().enumerate() {
                gram[(row, col)] = Complex64::new(v, 0.0);
            }
        }
        let ge = eigh_unchecked(&gram.hermitian_part());
        let cutoff = 1e-12 * ge.values.first().copied().unwrap_or(0.0).max(1e-300);
        let mut gram_pinv = vec![0.0; n * n];
        for l in 0..n {
            let lam = ge.values[l];
            if lam > cutoff {
                for a in 0..n {
                    let va = ge.vectors[(a, l)].re;
                    for b in 0..n {
                        gram_pinv[a * n + b] += va * ge.vectors[(b, l)].re / lam;
                    }
                }
            }
        }
        Self {
            q,
            target,
            subsets,
            bases,
            gram_pinv,
        }
    }

    fn rank(&self) -> usize {
        self.target.rows()
    }

    fn forward(&self, blocks: &[ComplexMatrix]) -> ComplexMatrix {
        let r = self.rank();
        let mut acc = ComplexMatrix::zeros(r, r);
        for (b, y) in self.bases.iter().zip(blocks) {
            acc = &acc + &b.matmul(y).matmul(&b.adjoint());
        }
        acc
    }

    fn residual(&self, blocks: &[ComplexMatrix]) -> f64 {
        (&self.forward(blocks) - &self.target).frobenius_norm()
    }

    fn project_affine(&self, blocks: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        let r = self.rank();
        let n = r * r;
        let defect = herm_to_coords(&(&self.forward(blocks) - &self.target));
        let mut w = vec![0.0; n];
        for a in 0..n {
            w[a] = (0..n).map(|b| self.gram_pinv[a * n + b] * defect[b]).sum();
        }
        let wm = coords_to_herm(r, &w);
        blocks
            .iter()
            .zip(&self.bases)
            .map(|(y, b)| {
                let corr = b.adjoint().matmul(&wm).matmul(b);
                (y - &corr).hermitian_part()
            })
            .collect()
    }

    fn dykstra(&self, max_iterations: usize, tol: f64) -> (Vec<ComplexMatrix>, f64, usize) {
        let zeros: Vec<ComplexMatrix> = self
            .bases
            .iter()
            .map(|b| ComplexMatrix::zeros(b.cols(), b.cols()))
            .collect();
        let mut x = zeros.clone();
        let mut p = zeros.clone();
        let mut q = zeros;
        let mut best = (x.clone(), f64::INFINITY);
        let mut iterations = 0;
        for it in 1..=max_iterations {
            iterations = it;
            let xp: Vec<ComplexMatrix> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
            let y = self.project_affine(&xp);
            p = xp.iter().zip(&y).map(|(a, b)| a - b).collect();
            let yq: Vec<ComplexMatrix> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
            x = yq.iter().map(psd_project_unchecked).collect();
            q = yq.iter().zip(&x).map(|(a, b)| a - b).collect();
            let res = self.residual(&x);
            if res < best.1 {
                best = (x.clone(), res);
            }
            if res <= tol {
                break;
            }
        }
        (best.0, best.1, iterations)
    }

    /// Minimises `½‖Σ_S N_S G_S G_S† N_S† − ρ̂‖²` over the factors `G_S`.
    fn polish(
        &self,
        start: &[ComplexMatrix],
        max_iterations: usize,
        tol: f64,
    ) -> (Vec<ComplexMatrix>, usize) {
        let sizes: Vec<usize> = self.bases.iter().map(|b| b.cols()).collect();
        let mut x0 = Vec::new();
        for y in start {
            let e = eigh_unchecked(y);
            let m = y.rows();
            let root = ComplexMatrix::from_fn(m, m, |i, j| {
                e.vectors[(i, j)] * e.values[j].max(0.0).sqrt()
            });
            for z in root.as_slice() {
                x0.push(z.re);
                x0.push(z.im);
            }
        }
        let unpack = |x: &[f64]| -> Vec<ComplexMatrix> {
            let mut off = 0;
            sizes
                .iter()
                .map(|&m| {
                    let g = ComplexMatrix::from_fn(m, m, |i, j| {
                        let idx = off + 2 * (i * m + j);
                        Complex64::new(x[idx], x[idx + 1])
                    });
                    off += 2 * m * m;
                    g
                })
                .collect()
        };
        let target = 0.5 * tol * tol * 0.25;
        let result = minimize(
            |x| {
                let gs = unpack(x);
                let ys: Vec<ComplexMatrix> = gs.iter().map(|g| g.matmul(&g.adjoint())).collect();
                let res = &self.forward(&ys) - &self.target;
                let f = 0.5 * res.frobenius_norm().powi(2);
                let mut grad = Vec::with_capacity(x.len());
                for (b, g) in self.bases.iter().zip(&gs) {
                    let gr = b.adjoint().matmul(&res).matmul(b).matmul(g).scale_real(2.0);
                    for z in gr.as_slice() {
                        grad.push(z.re);
                        grad.push(z.im);
                    }
                }
                (f, grad)
            },
            x0,
            max_iterations,
            1e-15,
            target,
        );
        let blocks = unpack(&result.x)
            .iter()
            .map(|g| g.matmul(&g.adjoint()))
            .collect();
        (blocks, result.iterations)
    }

    fn lift(&self, blocks: &[ComplexMatrix]) -> Vec<SubsetPart> {
        let d = self.q.rows();
        self.subsets
            .iter()
            .zip(&self.bases)
            .zip(blocks)
            .map(|((s, b), y)| {
                let full = self.q.matmul(b);
                let mut m = full.matmul(y).matmul(&full.adjoint());
                for i in 0..d {
                    for j in 0..d {
                        if !s.contains(&i) || !s.contains(&j) {
                            m[(i, j)] = ZERO;
                        }
                    }
                }
                SubsetPart {
                    subset: s.clone(),
                    matrix: m.hermitian_part(),
                }
            })
            .filter(|p| p.matrix.trace().re > 1e-15)
            .collect()
    }
}

/// Decides `r_C(ρ) ≤ k` and returns the witnessing parts when feasible.
pub fn feasible_at(
    rho: &DensityMatrix,
    k: usize,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityCertificate> {
    let d = rho.dim();
    if k == 0 || k > d {
        return argument(format!("k must satisfy 1 <= k <= {d} (got {k})"));
    }
    if !(opts.tol > 0.0) {
        return argument("feasibility tolerance must be positive");
    }
    if k == d {
        return Ok(full_certificate(rho));
    }
    if k == 1 {
        let cert = diagonal_certificate(rho);
        let feasible = cert.residual <= opts.tol;
        return Ok(FeasibilityCertificate { feasible, ..cert });
    }
    if let Some(psi) = rho.as_pure(opts.support_tol) {
        let rank = coherence_rank(&psi, super::RANK_TOL);
        if rank <= k {
            return Ok(pure_certificate(rho, &psi, k, super::RANK_TOL));
        }
        let cert = diagonal_certificate(rho);
        return Ok(FeasibilityCertificate {
            k,
            feasible: false,
            method: "pure".into(),
            ..cert
        });
    }

    let reduced = Reduced::new(rho, k, opts);
    let (blocks, res, mut iterations) = reduced.dykstra(opts.max_iterations, opts.tol * 0.5);
    let mut method = "dykstra".to_string();
    let mut blocks = blocks;
    if res > opts.tol * 0.5 && opts.polish_iterations > 0 {
        let (polished, it) = reduced.polish(&blocks, opts.polish_iterations, opts.tol);
        if reduced.residual(&polished) < res {
            blocks = polished;
            method = "dykstra+polish".into();
        }
        iterations += it;
    }
    let parts = reduced.lift(&blocks);
    let residual = residual_of(rho, &parts);
    Ok(FeasibilityCertificate {
        k,
        feasible: residual <= opts.tol,
        parts,
        residual,
        iterations,
        method,
    })
}

/// Certificate at `k` built from the spectral decomposition; feasible when
/// every eigenvector in the support has coherence rank at most `k`.
fn spectral_certificate(rho: &DensityMatrix, k: usize) -> FeasibilityCertificate {
    let d = rho.dim();
    let eig = rho.eigen();
    let mut parts = Vec::new();
    let mut feasible = true;
    for l in (0..d).filter(|&l| eig.values[l] > 0.0) {
        let v = eig.vector(l);
        let support: Vec<usize> = (0..d).filter(|&i| v[i].norm() > super::RANK_TOL).collect();
        if support.len() > k {
            feasible = false;
        }
        let subset = pad_subset(&support, k.max(support.len()), d);
        let mut m = ComplexMatrix::outer(&v, &v).scale_real(eig.values[l]);
        for i in 0..d {
            for j in 0..d {
                if !subset.contains(&i) || !subset.contains(&j) {
                    m[(i, j)] = ZERO;
                }
            }
        }
        parts.push(SubsetPart { subset, matrix: m });
    }
    let residual = residual_of(rho, &parts);
    FeasibilityCertificate {
        k,
        feasible: feasible && residual <= 1e-7,
        parts,
        residual,
        iterations: 0,
        method: "spectral".into(),
    }
}

/// Upper bound from the spectral decomposition and the trivial lower bound.
pub fn coherence_number_bounds(rho: &DensityMatrix) -> (usize, usize) {
    if rho.is_diagonal(1e-10) {
        return (1, 1);
    }
    let eig = rho.eigen();
    let upper = (0..rho.dim())
        .filter(|&i| eig.values[i] > 0.0)
        .map(|i| coherence_rank(&PureState::from_normalized(eig.vector(i)), super::RANK_TOL))
        .max()
        .unwrap_or(1);
    (2.min(upper), upper)
}

/// Smallest `k` with a feasible support decomposition, swept upward from 1.
pub fn coherence_number(rho: &DensityMatrix, opts: &FeasibilityOptions) -> Result<CoherenceNumber> {
    let d = rho.dim();
    if !(opts.tol > 0.0) {
        return argument("feasibility tolerance must be positive");
    }
    if let Some(psi) = rho.as_pure(opts.support_tol) {
        let rank = coherence_rank(&psi, super::RANK_TOL);
        let cert = pure_certificate(rho, &psi, rank, super::RANK_TOL);
        return Ok(CoherenceNumber {
            value: rank,
            exact: true,
            lower: rank,
            upper: rank,
            certificate: Some(cert),
            rejected: vec![],
        });
    }
    let (lower, upper) = coherence_number_bounds(rho);
    let at_upper = if upper == 1 {
        diagonal_certificate(rho)
    } else {
        spectral_certificate(rho, upper)
    };
    let at_upper = if at_upper.feasible {
        at_upper
    } else {
        full_certificate(rho)
    };
    let upper = at_upper.k;
    if lower == upper {
        return Ok(CoherenceNumber {
            value: upper,
            exact: true,
            lower,
            upper,
            certificate: Some(at_upper),
            rejected: vec![],
        });
    }
    if d > MAX_EXACT_DIM {
        return Ok(CoherenceNumber {
            value: upper,
            exact: false,
            lower,
            upper,
            certificate: Some(at_upper),
            rejected: vec![],
        });
    }
    let mut rejected = Vec::new();
    for k in lower..upper {
        let cert = feasible_at(rho, k, opts)?;
        if cert.feasible {
            return Ok(CoherenceNumber {
                value: k,
                exact: true,
                lower: k,
                upper: k,
                certificate: Some(cert),
                rejected,
            });
        }
        rejected.push(cert);
    }
    Ok(CoherenceNumber {
        value: upper,
        exact: true,
        lower: upper,
        upper,
        certificate: Some(at_upper),
        rejected,
    })
}

/// Pure-state decomposition of `ρ` assembled from a feasible certificate;
/// every element has coherence rank at most `cert.k`.
pub fn certificate_decomposition(cert: &FeasibilityCertificate) -> Option<Decomposition> {
    if !cert.feasible {
        return None;
    }
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for part in &cert.parts {
        let e = eigh_unchecked(&part.matrix);
        let d = part.matrix.rows();
        for l in 0..d {
            if e.values[l] <= 1e-14 {
                continue;
            }
            let mut v = e.vector(l);
            for (i, z) in v.iter_mut().enumerate() {
                if !part.subset.contains(&i) {
                    *z = ZERO;
                }
            }
            if let Ok(psi) = PureState::new(v) {
                weights.push(e.values[l]);
                states.push(psi);
            }
        }
    }
    if weights.is_empty() {
        return None;
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Some(Decomposition { weights, states })
}
