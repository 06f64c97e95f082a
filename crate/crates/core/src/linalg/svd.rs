//! One-sided (Hestenes) Jacobi singular value decomposition.

use num_complex::Complex64;

use super::matrix::{inner, vec_norm, ComplexMatrix, ZERO};
use crate::error::{validation, Result};

const MAX_SWEEPS: usize = 80;

/// `M = U Σ V†` with `U` (`rows x rows`) and `V` (`cols x cols`) unitary and
/// `values` holding the `min(rows, cols)` singular values in descending order.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub values: Vec<f64>,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl SpectrumResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        ComplexMatrix::from_fn(m, n, |i, j| {
            self.values
                .iter()
                .enumerate()
                .map(|(l, &s)| self.left[(i, l)] * s * self.right[(j, l)].conj())
                .sum()
        })
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&s| s > tol).count()
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<SpectrumResult> {
    if !m.is_finite() {
        return validation("svd input contains non-finite entries");
    }
    if m.rows() >= m.cols() {
        Ok(svd_tall(m))
    } else {
        let t = svd_tall(&m.adjoint());
        Ok(SpectrumResult {
            values: t.values,
            left: t.right,
            right: t.left,
        })
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    svd(m).map(|s| s.values)
}

fn svd_tall(m: &ComplexMatrix) -> SpectrumResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut cols_a: Vec<Vec<Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut cols_v: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| {
            let mut e = vec![ZERO; cols];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = cols_a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols_a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols_a[p], &cols_a[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rephase column q so that a_p† a_q is real positive
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols_a, p, q, phase, c, s);
                rotate(&mut cols_v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = cols_a.iter().map(|a| vec_norm(a)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    sigma = order.iter().map(|&j| sigma[j]).collect();

    let scale = sigma.first().copied().unwrap_or(0.0);
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(rows);
    for (slot, &j) in order.iter().enumerate() {
        let s = sigma[slot];
        if s > 1e-300 && s > 1e-14 * scale {
            left_cols.push(cols_a[j].iter().map(|z| z / s).collect());
        } else {
            break;
        }
    }
    complete_orthonormal(&mut left_cols, rows);

    let left = ComplexMatrix::from_fn(rows, rows, |i, l| left_cols[l][i]);
    let right = ComplexMatrix::from_fn(cols, cols, |i, l| cols_v[order[l]][i]);
    SpectrumResult {
        values: sigma,
        left,
        right,
    }
}

fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let ap = &mut lo[p];
    let aq = &mut hi[0];
    for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Extends a set of orthonormal vectors to an orthonormal basis of `C^n`
/// using twice-iterated Gram–Schmidt on the standard basis.
pub(crate) fn complete_orthonormal(basis: &mut Vec<Vec<Complex64>>, n: usize) {
    let mut e = 0;
    while basis.len() < n && e < n {
        let mut v = vec![ZERO; n];
        v[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-8 {
            basis.push(v.into_iter().map(|z| z / nv).collect());
        }
        e += 1;
    }
}
