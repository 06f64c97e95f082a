use itertools::Itertools;

use super::matrix::ComplexMatrix;
use crate::error::{argument, Result};

/// All `k`-subsets of `0..n` in lexicographic ascending order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `k`-th compound matrix: the `C(rows,k) x C(cols,k)` matrix of `k x k`
/// minors, rows and columns indexed by lexicographically ordered subsets.
pub fn compound_matrix(m: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    if k == 0 || k > m.rows().min(m.cols()) {
        return argument(format!(
            "compound order {k} outside 1..={} for a {}x{} matrix",
            m.rows().min(m.cols()),
            m.rows(),
            m.cols()
        ));
    }
    let rs = index_subsets(m.rows(), k);
    let cs = index_subsets(m.cols(), k);
    Ok(ComplexMatrix::from_fn(rs.len(), cs.len(), |a, b| {
        m.select(&rs[a], &cs[b]).determinant()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn top_compound_is_determinant() {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(1., 1.),
                Complex64::new(2., 0.),
                Complex64::new(0., -1.),
                Complex64::new(3., 0.),
            ],
        )
        .unwrap();
        let k = compound_matrix(&m, 2).unwrap();
        assert_eq!((k.rows(), k.cols()), (1, 1));
        assert!((k[(0, 0)] - m.determinant()).norm() < 1e-15);
    }

    #[test]
    fn compound_of_identity() {
        for d in 1..=5 {
            for k in 1..=d {
                let c = compound_matrix(&ComplexMatrix::identity(d), k).unwrap();
                let n = binomial(d, k) as usize;
                assert_eq!(c, ComplexMatrix::identity(n));
            }
        }
    }

    #[test]
    fn order_out_of_range() {
        let m = ComplexMatrix::identity(3);
        assert!(compound_matrix(&m, 0).is_err());
        assert!(compound_matrix(&m, 4).is_err());
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(
            index_subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(binomial(8, 4), 70.0);
    }
}
