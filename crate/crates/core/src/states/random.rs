use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::DensityMatrix;
use super::pure::PureState;
use crate::error::{argument, Result};
use crate::linalg::{complete_orthonormal, inner, vec_norm, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian with independent `N(0, 1/2)` parts.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random pure state of dimension `d`.
pub fn random_pure(d: usize, seed: u64) -> Result<PureState> {
    if d == 0 {
        return argument("dimension must be at least 1");
    }
    Ok(random_pure_with(&mut rng_from_seed(seed), d))
}

pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        if vec_norm(&v) > 1e-12 {
            return PureState::new(v).expect("nonzero Gaussian vector");
        }
    }
}

/// Normalised Wishart state `G G† / tr(G G†)` with `G` a `d x rank` complex
/// Gaussian matrix.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return argument(format!(
            "need d >= 1 and 1 <= rank <= d (got d={d}, rank={rank})"
        ));
    }
    Ok(random_density_with(&mut rng_from_seed(seed), d, rank))
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let w = &g * &g.adjoint();
    DensityMatrix::from_unnormalized(w).expect("Wishart matrix is PSD with positive trace")
}

/// Haar-random unitary via Gram–Schmidt on Gaussian columns.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p = inner(c, &v);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let n = vec_norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    complete_orthonormal(&mut cols, d);
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}
