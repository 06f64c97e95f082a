use cohlab::coherence::{
    ccN_pure, cc_mixed, coherence_concurrence_pure, coherence_number, coherence_rank, l1_coherence,
    l1_coherence_pure, relative_entropy_pure, FeasibilityOptions, RANK_TOL,
};
use cohlab::conversion::{convert, convert_pure, specht_ratio, theorem4_bounds};
use cohlab::entanglement::{
    g_concurrence_pure, k_concurrence_mixed, k_concurrence_pure, k_concurrence_via_compound,
    maclaurin_chain, schmidt_coeffs, BipartitePure,
};
use cohlab::roof::RoofOptions;
use cohlab::states::{random_density, PureState};
use num_complex::Complex64;
use proptest::prelude::*;

fn amplitudes(max_dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    })
}

fn pure(max_dim: usize) -> impl Strategy<Value = PureState> {
    amplitudes(max_dim)
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(|v| PureState::new(v).unwrap())
}

fn sparse_pure(max_dim: usize) -> impl Strategy<Value = PureState> {
    (
        amplitudes(max_dim),
        prop::collection::vec(any::<bool>(), max_dim),
    )
        .prop_map(|(v, mask)| {
            let mut v = v;
            for (z, keep) in v.iter_mut().zip(mask) {
                if !keep {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
            v
        })
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(|v| PureState::new(v).unwrap())
}

fn bipartite(max_side: usize) -> impl Strategy<Value = BipartitePure> {
    (2..=max_side).prop_flat_map(|d| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
            .prop_filter("nonzero", |v| {
                v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
            })
            .prop_map(|v| {
                let psi =
                    PureState::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                        .unwrap();
                BipartitePure::from_state(&psi).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pure_monotone_ranges(psi in pure(6)) {
        let d = psi.dim() as f64;
        let cc = coherence_concurrence_pure(&psi);
        prop_assert!(cc >= -1e-12 && cc <= d - 1.0 + 1e-9);
        prop_assert!((cc - l1_coherence_pure(&psi)).abs() < 1e-12);
        let re = relative_entropy_pure(&psi);
        prop_assert!(re >= 0.0 && re <= d.log2() + 1e-9);
        let n = ccN_pure(&psi);
        prop_assert!(n >= 0.0 && n <= 1.0 + 1e-12);
    }

    #[test]
    fn full_coherence_iff_full_rank(psi in sparse_pure(6)) {
        let rank = coherence_rank(&psi, RANK_TOL);
        prop_assert_eq!(ccN_pure(&psi) > 1e-12, rank == psi.dim());
    }

    #[test]
    fn coherence_number_of_pure_is_rank(psi in sparse_pure(5)) {
        let r = coherence_number(&psi.projector(), &FeasibilityOptions::default()).unwrap();
        prop_assert_eq!(r.value, coherence_rank(&psi, RANK_TOL));
        prop_assert!(r.exact);
    }

    #[test]
    fn k_concurrence_dual_paths(psi in bipartite(5)) {
        for k in 2..=psi.dim() {
            let a = k_concurrence_pure(&psi, k).unwrap();
            let b = k_concurrence_via_compound(&psi, k).unwrap();
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn maclaurin_ordering_and_g_bound(psi in bipartite(5)) {
        let report = maclaurin_chain(&psi);
        prop_assert!(report.chain_ok);
        let g = g_concurrence_pure(&psi);
        for v in report.k_values.values() {
            prop_assert!(g <= v + 1e-10);
            prop_assert!(*v <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn conversion_spectrum_is_population(psi in pure(5)) {
        prop_assume!(psi.dim() >= 2);
        let out = convert_pure(&psi).unwrap();
        let mut pops = psi.probabilities();
        pops.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let lambda = schmidt_coeffs(&out);
        for (a, b) in lambda.iter().zip(&pops) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn specht_ratio_brackets(eps in 0.001f64..=1.0) {
        let s = specht_ratio(eps).unwrap();
        prop_assert!(s >= 1.0 - 1e-12);
        prop_assert!(s <= 1.0 / (eps * eps) + 1e-12);
    }

    #[test]
    fn theorem4_on_floored_states(raw in prop::collection::vec((0.2f64..1.0, -3.2f64..3.2), 3..=4)) {
        let v: Vec<Complex64> = raw.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let psi = PureState::new(v).unwrap();
        let eps = psi.amplitudes().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let r = theorem4_bounds(&psi, eps).unwrap();
        prop_assert!(r.ok);
        prop_assert!(r.lower <= r.g_value + 1e-8 && r.g_value <= r.upper + 1e-8);
    }
}

#[test]
fn mixed_cc_estimate_dominates_l1() {
    for seed in 0..20 {
        let d = 2 + seed as usize % 3;
        let rho = random_density(d, 2, seed).unwrap();
        let est = cc_mixed(&rho, &RoofOptions::default().with_restarts(4)).unwrap();
        assert!(est.value >= l1_coherence(&rho) - 1e-9, "seed {seed}");
        assert!(est.value <= est.eigen_average + 1e-12);
    }
}

#[test]
fn conversion_preserves_trace_and_incoherence() {
    for seed in 0..100 {
        let d = 2 + seed as usize % 3;
        let p: Vec<f64> = (0..d)
            .map(|i| 1.0 + ((seed as usize + i) % 5) as f64)
            .collect();
        let total: f64 = p.iter().sum();
        let rho = cohlab::states::DensityMatrix::diagonal(
            &p.iter().map(|x| x / total).collect::<Vec<_>>(),
        )
        .unwrap();
        let out = convert(&rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(out.is_diagonal(1e-14));
        let opts = RoofOptions::default().with_restarts(1);
        for k in 2..=d {
            assert!(k_concurrence_mixed(&out, k, &opts).unwrap().value <= 1e-7);
        }
    }
}
