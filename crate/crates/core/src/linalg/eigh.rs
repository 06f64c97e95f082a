//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{validation, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|l| v[(i, l)] * v[(j, l)].conj() * fv[l]).sum()
        })
    }

    pub fn vector(&self, l: usize) -> Vec<Complex64> {
        self.vectors.column(l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within `1e-10` (entry-wise); only its
/// Hermitian part is used.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return validation("eigh requires a square matrix");
    }
    if !h.is_finite() {
        return validation("eigh input contains non-finite entries");
    }
    let scale = h.frobenius_norm().max(1.0);
    if h.hermitian_defect() > 1e-10 * scale {
        return validation(format!(
            "matrix is not Hermitian (defect {:.3e})",
            h.hermitian_defect()
        ));
    }
    Ok(eigh_unchecked(&h.hermitian_part()))
}

pub(crate) fn eigh_unchecked(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase making the (p,q) entry real and positive
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns (p, q)
                let pc = phase.conj();
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -pc * s;
                let g_qq = pc * c;
                // A <- A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * g_pp + aiq * g_qp;
                    a[(i, q)] = aip * g_pq + aiq * g_qq;
                }
                // A <- G† A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
                    a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * g_pp + viq * g_qp;
                    v[(i, q)] = vip * g_pq + viq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&l| a[(l, l)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Matrix exponential `exp(i H)` of a Hermitian `H`; the result is unitary.
pub(crate) fn expi_hermitian(h: &ComplexMatrix) -> ComplexMatrix {
    let e = eigh_unchecked(h);
    let n = e.values.len();
    let ph: Vec<Complex64> = e
        .values
        .iter()
        .map(|&x| Complex64::from_polar(1.0, x))
        .collect();
    let v = &e.vectors;
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|l| v[(i, l)] * ph[l] * v[(j, l)].conj()).sum()
    })
}
