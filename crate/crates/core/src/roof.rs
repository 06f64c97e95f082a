//! Convex-roof estimation over pure-state decompositions.
//!
//! Every decomposition of a rank-`r` state `ρ = Σ_i μ_i |e_i⟩⟨e_i|` into `n`
//! elements has the form `|ψ̃_a⟩ = Σ_i U_{ai} √μ_i |e_i⟩` for an `n x n`
//! unitary `U` (only the first `r` columns matter). The search runs over
//! `U ← U exp(iH)`, `H` Hermitian, with L-BFGS steps in the entries of `H`
//! and analytic gradients of the pure-state measure.
//!
//! Pure measures are supplied in their *weighted* form `f(ψ̃) = p E(ψ̃/√p)`
//! with `p = ‖ψ̃‖²`, which is homogeneous of degree two, so the objective is
//! simply `Σ_a f(ψ̃_a)`. Every returned value is attained by an explicit
//! decomposition and hence bounds the convex roof from above.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::linalg::{complete_orthonormal, expi_hermitian, inner, vec_norm, ComplexMatrix, ZERO};
use crate::optim::{dot, lbfgs_direction, norm};
use crate::states::{random_unitary_with, rng_from_seed, Decomposition, DensityMatrix, PureState};

/// Eigenvalues at or below this are treated as outside the support.
const SUPPORT_TOL: f64 = 1e-12;
/// Decomposition elements with weight at or below this are discarded.
const WEIGHT_TOL: f64 = 1e-15;

/// A pure-state measure usable inside a convex roof.
pub trait PureMeasure: Sync {
    /// Weighted value `‖v‖² E(v/‖v‖)` on an unnormalised vector.
    fn weighted(&self, v: &[Complex64]) -> f64;

    /// Gradient `G` with `d f = Re Σ_j conj(G_j) dv_j`. Returning zeros at
    /// non-differentiable points is acceptable.
    fn gradient(&self, v: &[Complex64]) -> Vec<Complex64>;

    /// Value on a normalised state.
    fn value(&self, psi: &PureState) -> f64 {
        self.weighted(psi.amplitudes())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoofOptions {
    /// Random unitary starts in addition to the eigendecomposition and any
    /// supplied seed decompositions.
    pub restarts: usize,
    /// Decomposition size is `rank + extra_elements`.
    pub extra_elements: usize,
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub seed: u64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            extra_elements: 2,
            max_iterations: 400,
            gradient_tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

impl RoofOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Best decomposition found. `value` is an upper bound on the convex roof.
#[derive(Debug, Clone, Serialize)]
pub struct RoofEstimate {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Average over the spectral decomposition.
    pub eigen_average: f64,
    pub starts: usize,
    /// Whether the winning local search met its gradient tolerance.
    pub converged: bool,
}

struct Problem<'a, M: PureMeasure + ?Sized> {
    measure: &'a M,
    /// `n x dim`, first `rank` rows are `√μ_i e_i^T`, remaining rows zero.
    weighted_basis: ComplexMatrix,
    rank: usize,
    n: usize,
}

struct LocalResult {
    value: f64,
    unitary: ComplexMatrix,
    converged: bool,
}

impl<M: PureMeasure + ?Sized> Problem<'_, M> {
    fn rows(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.matmul(&self.weighted_basis)
    }

    fn objective(&self, u: &ComplexMatrix) -> f64 {
        let psi = self.rows(u);
        (0..self.n).map(|a| self.measure.weighted(psi.row(a))).sum()
    }

    /// Objective and its gradient with respect to `H` in `U exp(iH)` at `H = 0`,
    /// flattened to `n²` real coordinates.
    fn objective_and_gradient(&self, u: &ComplexMatrix) -> (f64, Vec<f64>) {
        let psi = self.rows(u);
        let dim = psi.cols();
        let mut g = ComplexMatrix::zeros(self.n, dim);
        let mut f = 0.0;
        for a in 0..self.n {
            let row = psi.row(a);
            f += self.measure.weighted(row);
            let ga = self.measure.gradient(row);
            for (j, z) in ga.into_iter().enumerate() {
                g[(a, j)] = z;
            }
        }
        // B = W̃ G† U, gradient K = i (B - B†) / 2
        let b = self.weighted_basis.matmul(&g.adjoint()).matmul(u);
        let n = self.n;
        let mut grad = Vec::with_capacity(n * n);
        for i in 0..n {
            // K_ii = i (B_ii - conj B_ii)/2 = -Im B_ii
            grad.push(-b[(i, i)].im);
        }
        for i in 0..n {
            for j in i + 1..n {
                let k = Complex64::new(0.0, 0.5) * (b[(i, j)] - b[(j, i)].conj());
                grad.push(2.0 * k.re);
                grad.push(2.0 * k.im);
            }
        }
        (f, grad)
    }

    fn step(&self, u: &ComplexMatrix, x: &[f64]) -> ComplexMatrix {
        let h = hermitian_from_coords(self.n, x);
        u.matmul(&expi_hermitian(&h))
    }

    fn local_search(
        &self,
        start: ComplexMatrix,
        max_iterations: usize,
        gradient_tol: f64,
    ) -> LocalResult {
        const HISTORY: usize = 8;
        const ARMIJO: f64 = 1e-4;
        let mut u = start;
        let (mut f, mut g) = self.objective_and_gradient(&u);
        let mut hist_s: Vec<Vec<f64>> = Vec::new();
        let mut hist_y: Vec<Vec<f64>> = Vec::new();
        let mut converged = false;
        let mut stalls = 0usize;

        for _ in 0..max_iterations {
            let gnorm = norm(&g);
            if gnorm <= gradient_tol || f <= 1e-15 {
                converged = true;
                break;
            }
            let mut p = lbfgs_direction(&g, &hist_s, &hist_y);
            let mut slope = dot(&g, &p);
            if slope >= 0.0 {
                hist_s.clear();
                hist_y.clear();
                p = g.iter().map(|x| -x).collect();
                slope = -gnorm * gnorm;
            }
            let mut t = if hist_s.is_empty() {
                (0.5 / norm(&p)).min(1.0)
            } else {
                1.0
            };
            let mut accepted = None;
            for _ in 0..40 {
                let x: Vec<f64> = p.iter().map(|v| v * t).collect();
                let cand = self.step(&u, &x);
                let fc = self.objective(&cand);
                if fc <= f + ARMIJO * t * slope {
                    accepted = Some((x, cand, fc));
                    break;
                }
                t *= 0.5;
            }
            let Some((s, cand, fc)) = accepted else {
                // no decrease along the direction: restart memory once, then stop
                if hist_s.is_empty() {
                    break;
                }
                hist_s.clear();
                hist_y.clear();
                continue;
            };
            let (f_new, g_new) = self.objective_and_gradient(&cand);
            debug_assert!((f_new - fc).abs() <= 1e-9 * (1.0 + fc.abs()));
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            if dot(&s, &y) > 1e-16 * norm(&s) * norm(&y) {
                hist_s.push(s);
                hist_y.push(y);
                if hist_s.len() > HISTORY {
                    hist_s.remove(0);
                    hist_y.remove(0);
                }
            }
            let decrease = f - f_new;
            u = cand;
            f = f_new;
            g = g_new;
            if decrease <= 1e-15 * (1.0 + f.abs()) {
                stalls += 1;
                if stalls >= 5 {
                    converged = true;
                    break;
                }
            } else {
                stalls = 0;
            }
        }
        LocalResult {
            value: f,
            unitary: u,
            converged,
        }
    }

    fn decomposition(&self, u: &ComplexMatrix) -> Decomposition {
        let psi = self.rows(u);
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for a in 0..self.n {
            let row = psi.row(a);
            let w: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if w > WEIGHT_TOL {
                let s = w.sqrt();
                weights.push(w);
                states.push(PureState::from_normalized(
                    row.iter().map(|z| z / s).collect(),
                ));
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Decomposition { weights, states }
    }

    /// Unitary reproducing a seed decomposition, if it matches the support.
    fn unitary_from_seed(
        &self,
        eig_vectors: &[Vec<Complex64>],
        eig_values: &[f64],
        seed: &Decomposition,
    ) -> Option<ComplexMatrix> {
        if seed.len() > self.n {
            return None;
        }
        // U_{ai} = ⟨e_i|ψ̃_a⟩ / √μ_i
        let mut cols: Vec<Vec<Complex64>> = (0..self.rank)
            .map(|i| {
                let mut c = vec![ZERO; self.n];
                for (a, (p, s)) in seed.iter().enumerate() {
                    let amp = inner(&eig_vectors[i], s.amplitudes()) * p.sqrt();
                    c[a] = amp / eig_values[i].sqrt();
                }
                c
            })
            .collect();
        // tolerate small inconsistencies by re-orthonormalising
        for i in 0..cols.len() {
            for j in 0..i {
                let (lo, hi) = cols.split_at_mut(i);
                let proj = inner(&lo[j], &hi[0]);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= proj * y;
                }
            }
            let nv = vec_norm(&cols[i]);
            if nv < 1e-6 {
                return None;
            }
            cols[i].iter_mut().for_each(|z| *z /= nv);
        }
        complete_orthonormal(&mut cols, self.n);
        Some(ComplexMatrix::from_fn(self.n, self.n, |a, i| cols[i][a]))
    }
}

fn hermitian_from_coords(n: usize, x: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(x[i], 0.0);
    }
    let mut idx = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(x[idx], x[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// Upper-bound estimate of `min_{p_a, ψ_a} Σ_a p_a E(ψ_a)`.
///
/// `seeds` are decompositions of `rho` known to the caller; each is evaluated
/// directly and also used as a starting point, so the estimate never exceeds
/// the best seed value.
pub fn convex_roof<M: PureMeasure + ?Sized>(
    rho: &DensityMatrix,
    measure: &M,
    opts: &RoofOptions,
    seeds: &[Decomposition],
) -> Result<RoofEstimate> {
    if seeds.iter().any(|s| s.dim() != rho.dim()) {
        return validation("seed decomposition dimension does not match the state");
    }
    let eig = rho.eigen();
    let support: Vec<usize> = (0..rho.dim())
        .filter(|&i| eig.values[i] > SUPPORT_TOL)
        .collect();
    let rank = support.len();
    let vectors: Vec<Vec<Complex64>> = support.iter().map(|&i| eig.vector(i)).collect();
    let values: Vec<f64> = support.iter().map(|&i| eig.values[i]).collect();

    let spectral = Decomposition {
        weights: {
            let t: f64 = values.iter().sum();
            values.iter().map(|v| v / t).collect()
        },
        states: vectors
            .iter()
            .map(|v| PureState::from_normalized(v.clone()))
            .collect(),
    };
    let eigen_average = spectral.average(|s| measure.value(s));

    let mut best_direct: Option<(f64, Decomposition)> = None;
    for s in seeds {
        let v = s.average(|p| measure.value(p));
        if best_direct.as_ref().is_none_or(|(b, _)| v < *b) {
            best_direct = Some((v, s.clone()));
        }
    }

    if rank <= 1 {
        let (value, decomposition) = match best_direct {
            Some((v, d)) if v < eigen_average => (v, d),
            _ => (eigen_average, spectral),
        };
        return Ok(RoofEstimate {
            value,
            decomposition,
            eigen_average,
            starts: 1,
            converged: true,
        });
    }

    let n = seeds
        .iter()
        .map(Decomposition::len)
        .max()
        .unwrap_or(0)
        .max(rank + opts.extra_elements);
    let dim = rho.dim();
    let weighted_basis = ComplexMatrix::from_fn(n, dim, |i, j| {
        if i < rank {
            vectors[i][j] * values[i].sqrt()
        } else {
            ZERO
        }
    });
    let problem = Problem {
        measure,
        weighted_basis,
        rank,
        n,
    };

    let mut starts: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(n)];
    for s in seeds {
        if let Some(u) = problem.unitary_from_seed(&vectors, &values, s) {
            starts.push(u);
        }
    }
    let fixed = starts.len();
    let total = fixed + opts.restarts;

    let results: Vec<LocalResult> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let start = if idx < fixed {
                starts[idx].clone()
            } else {
                let mut rng =
                    rng_from_seed(opts.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                random_unitary_with(&mut rng, n)
            };
            problem.local_search(start, opts.max_iterations, opts.gradient_tol)
        })
        .collect();

    let (best_idx, best) = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let _ = best_idx;
    let mut value = best.value;
    let mut decomposition = problem.decomposition(&best.unitary);
    let converged = best.converged;
    if let Some((v, d)) = best_direct {
        if v < value {
            value = v;
            decomposition = d;
        }
    }
    Ok(RoofEstimate {
        value: value.max(0.0),
        decomposition,
        eigen_average,
        starts: total,
        converged,
    })
}
