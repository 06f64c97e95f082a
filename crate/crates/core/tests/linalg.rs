use cohlab::linalg::{
    binomial, compound_matrix, eigh, elementary_symmetric, elementary_symmetric_recurrence,
    index_subsets, singular_values, svd, ComplexMatrix,
};
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(z.re, z.im)
    })
}

#[test]
fn svd_round_trip_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..1000 {
        let rows = 1 + case % 8;
        let cols = 1 + (case / 8) % 8;
        let m = random_matrix(&mut rng, rows, cols);
        let s = svd(&m).unwrap();
        let err = (&s.reconstruct() - &m).frobenius_norm() / m.frobenius_norm();
        assert!(err <= 1e-10, "{rows}x{cols}: {err}");
        for u in [&s.left, &s.right] {
            let g = &u.adjoint() * u;
            assert!(g.max_abs_diff(&ComplexMatrix::identity(u.rows())) < 1e-10);
        }
    }
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let n = 1 + case % 8;
        let m = random_matrix(&mut rng, n, n + case % 3);
        let ours = singular_values(&m).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&m).singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "{ours:?} vs {theirs:?}");
        }
    }
}

#[test]
fn hermitian_spectrum_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let n = 1 + case % 8;
        let a = random_matrix(&mut rng, n, n);
        let h = (&a + &a.adjoint()).scale_real(0.5);
        let ours = eigh(&h).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&h)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(ours.reconstruct_with(|x| x).max_abs_diff(&h) < 1e-10);
    }
}

#[test]
fn cauchy_binet() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..200 {
        let d = 1 + case % 5;
        let a = random_matrix(&mut rng, d, d);
        let b = random_matrix(&mut rng, d, d);
        for k in 1..=d {
            let lhs = compound_matrix(&(&a * &b), k).unwrap();
            let rhs = &compound_matrix(&a, k).unwrap() * &compound_matrix(&b, k).unwrap();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
        }
    }
}

#[test]
fn compound_trace_is_symmetric_polynomial_of_gram_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let d = 1 + case % 6;
        let m = random_matrix(&mut rng, d, d);
        let gram = &m.adjoint() * &m;
        let squares: Vec<f64> = singular_values(&m).unwrap().iter().map(|s| s * s).collect();
        for k in 1..=d {
            let t = compound_matrix(&gram, k).unwrap().trace();
            let s = elementary_symmetric(&squares, k).unwrap();
            assert!((t.re - s).abs() <= 1e-9 * s.max(1.0) && t.im.abs() <= 1e-9);
        }
    }
}

#[test]
fn compound_entries_are_minors() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let m = random_matrix(&mut rng, 4, 4);
    let c = compound_matrix(&m, 2).unwrap();
    let subsets = index_subsets(4, 2);
    assert_eq!(c.rows(), binomial(4, 2) as usize);
    for (r, rs) in subsets.iter().enumerate() {
        for (s, cs) in subsets.iter().enumerate() {
            let minor =
                m[(rs[0], cs[0])] * m[(rs[1], cs[1])] - m[(rs[0], cs[1])] * m[(rs[1], cs[0])];
            assert!((c[(r, s)] - minor).norm() < 1e-14);
        }
    }
}

fn brute_force_symmetric(values: &[i64], k: usize) -> i64 {
    (0u32..1 << values.len())
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| {
            (0..values.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .product::<i64>()
        })
        .sum()
}

#[test]
fn elementary_symmetric_exact_on_integers() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let d = 1 + case % 10;
        let ints: Vec<i64> = (0..d).map(|_| rng.random_range(-6..=6)).collect();
        let values: Vec<f64> = ints.iter().map(|&v| v as f64).collect();
        let rec = elementary_symmetric_recurrence(&values);
        for k in 0..=d {
            let exact = brute_force_symmetric(&ints, k) as f64;
            assert_eq!(
                elementary_symmetric(&values, k).unwrap(),
                exact,
                "{ints:?} k={k}"
            );
            assert_eq!(rec[k], exact);
        }
    }
}

#[test]
fn long_inputs_agree_between_paths() {
    let values: Vec<f64> = (1..=24).map(|i| 1.0 / i as f64).collect();
    let rec = elementary_symmetric_recurrence(&values);
    for k in [1, 2, 5, 12, 24] {
        let direct = elementary_symmetric(&values, k).unwrap();
        assert!((direct - rec[k]).abs() <= 1e-12 * rec[k].abs().max(1e-300));
    }
}
