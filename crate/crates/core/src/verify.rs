//! Seeded property suites over random corpora.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherence::{
    ccN_pure, coherence_number, coherence_rank, l1_coherence_pure, FeasibilityOptions, RANK_TOL,
};
use crate::conversion::{
    conversion_channel, convert_pure, lemma1_check, theorem2_chain, theorem3_verify,
    theorem4_bounds, CHAIN_SLACK,
};
use crate::entanglement::{
    g_concurrence_pure, k_concurrence_pure, k_concurrence_via_compound, maclaurin_chain,
    BipartitePure, ZERO_THRESHOLD,
};
use crate::error::Result;
use crate::grover::{
    ccN_closed_form, ccN_derivative, critical_iteration, grover_state, statevector_deviation,
    success_probability, GroverParams,
};
use crate::linalg::{compound_matrix, ComplexMatrix};
use crate::roof::RoofOptions;
use crate::states::{
    density_from, random_density_with, random_incoherent_channel, random_pure_with, rng_from_seed,
    Decomposition, DensityMatrix, PureState, SeededRng,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CauchyBinet,
    Maclaurin,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Lemma1,
    GroverConsistency,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CauchyBinet,
        Suite::Maclaurin,
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Theorem3,
        Suite::Theorem4,
        Suite::Lemma1,
        Suite::GroverConsistency,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::CauchyBinet => "cauchy-binet",
            Suite::Maclaurin => "maclaurin",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::Lemma1 => "lemma1",
            Suite::GroverConsistency => "grover-consistency",
        }
    }

    pub fn default_cases(&self) -> usize {
        match self {
            Suite::CauchyBinet => 1000,
            Suite::Theorem3 => 200,
            Suite::GroverConsistency => 50,
            Suite::Theorem4 => 500,
            _ => 200,
        }
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            Suite::CauchyBinet | Suite::Theorem4 => 1e-8,
            Suite::Maclaurin => 1e-10,
            Suite::Theorem2 => CHAIN_SLACK,
            Suite::Theorem1 | Suite::Theorem3 | Suite::Lemma1 => 0.0,
            Suite::GroverConsistency => 1e-9,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| crate::Error::Argument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    pub tolerance: f64,
}

impl VerifyConfig {
    pub fn for_suite(suite: Suite, seed: u64) -> Self {
        Self {
            seed,
            cases: suite.default_cases(),
            tolerance: suite.default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub case: usize,
    pub label: String,
    /// Worst signed excess over the checked bounds, or `1` when an exact
    /// condition fails; the case passes when it is at most the tolerance.
    pub residual: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub tolerance: f64,
    pub violations: usize,
    pub max_residual: f64,
    pub passed: bool,
    pub results: Vec<CaseResult>,
}

struct Check {
    label: String,
    residual: f64,
    notes: Vec<String>,
}

impl Check {
    fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            residual: f64::NEG_INFINITY,
            notes: Vec::new(),
        }
    }

    fn excess(&mut self, value: f64) {
        self.residual = self.residual.max(value);
    }

    fn note(&mut self, flag: bool, message: impl FnOnce() -> String) {
        if flag {
            self.notes.push(message());
            self.residual = self.residual.max(1.0);
        }
    }
}

fn case_seed(seed: u64, case: usize) -> u64 {
    let mut z = seed ^ (case as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if !(cfg.tolerance >= 0.0) || cfg.cases == 0 {
        return crate::error::argument("tolerance must be >= 0 and cases >= 1");
    }
    let results: Vec<CaseResult> = (0..cfg.cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = rng_from_seed(case_seed(cfg.seed, case));
            let check = match suite {
                Suite::CauchyBinet => cauchy_binet_case(case, &mut rng),
                Suite::Maclaurin => maclaurin_case(case, &mut rng),
                Suite::Theorem1 => theorem1_case(case, &mut rng),
                Suite::Theorem2 => theorem2_case(case, &mut rng),
                Suite::Theorem3 => theorem3_case(case, &mut rng),
                Suite::Theorem4 => theorem4_case(case, &mut rng),
                Suite::Lemma1 => lemma1_case(case, &mut rng),
                Suite::GroverConsistency => grover_case(case, &mut rng),
            }?;
            let residual = if check.residual == f64::NEG_INFINITY {
                0.0
            } else {
                check.residual
            };
            Ok(CaseResult {
                case,
                label: check.label,
                residual,
                ok: residual <= cfg.tolerance,
                notes: check.notes,
            })
        })
        .collect::<Result<_>>()?;
    let violations = results.iter().filter(|r| !r.ok).count();
    let max_residual = results
        .iter()
        .map(|r| r.residual)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SuiteReport {
        suite,
        seed: cfg.seed,
        cases: cfg.cases,
        tolerance: cfg.tolerance,
        violations,
        max_residual,
        passed: violations == 0,
        results,
    })
}

/// Pure state of dimension `d` supported on `l` random basis indices.
fn random_supported_pure(rng: &mut SeededRng, d: usize, l: usize) -> PureState {
    let core = random_pure_with(rng, l);
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    for (pos, idx) in sample(rng, d, l).into_iter().enumerate() {
        amps[idx] = core.amplitudes()[pos];
    }
    PureState::new(amps).expect("normalized embedding")
}

fn uniform_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

/// Bipartite pure state on `d ⊗ d` with Schmidt rank at most `rank`.
fn random_bipartite(rng: &mut SeededRng, d: usize, rank: usize) -> BipartitePure {
    let m = &uniform_matrix(rng, d, rank) * &uniform_matrix(rng, rank, d);
    let norm = m.frobenius_norm();
    BipartitePure::new(m.scale_real(1.0 / norm)).expect("normalized matrix")
}

fn random_mixture(rng: &mut SeededRng, d: usize) -> Result<DensityMatrix> {
    let terms = rng.random_range(1..=3);
    let states: Vec<PureState> = (0..terms)
        .map(|_| {
            let l = rng.random_range(1..=d);
            random_supported_pure(rng, d, l)
        })
        .collect();
    let raw: Vec<f64> = (0..terms).map(|_| 0.1 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    density_from(&Decomposition::new(
        raw.iter().map(|w| w / total).collect(),
        states,
    )?)
}

fn cauchy_binet_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 2 + case % 4;
    let psi = BipartitePure::from_state(&random_pure_with(rng, d * d))?;
    let mut c = Check::new(format!("d={d}"));
    for k in 2..=d {
        let a = k_concurrence_pure(&psi, k)?;
        let b = k_concurrence_via_compound(&psi, k)?;
        c.excess((a - b).abs());
    }
    let x = uniform_matrix(rng, d, d);
    let y = uniform_matrix(rng, d, d);
    for k in 1..=d {
        let lhs = compound_matrix(&(&x * &y), k)?;
        let rhs = &compound_matrix(&x, k)? * &compound_matrix(&y, k)?;
        c.excess(lhs.max_abs_diff(&rhs));
    }
    Ok(c)
}

fn maclaurin_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 3 + case % 2;
    let psi = if case % 3 == 0 {
        let rank = rng.random_range(1..=d);
        random_bipartite(rng, d, rank)
    } else {
        BipartitePure::from_state(&random_pure_with(rng, d * d))?
    };
    let report = maclaurin_chain(&psi);
    let mut c = Check::new(format!("d={d} schmidt_rank={}", report.schmidt_rank));
    let values: Vec<f64> = report.k_values.values().copied().collect();
    for w in values.windows(2) {
        c.excess(w[1] - w[0]);
    }
    let g = g_concurrence_pure(&psi);
    for v in &values {
        c.excess(g - v);
    }
    c.excess((g - report.k_values[&d]).abs());
    Ok(c)
}

fn theorem1_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 2 + case % 3;
    let rho = random_mixture(rng, d)?;
    let n_kraus = rng.random_range(1..=3);
    let channel = random_incoherent_channel(d, n_kraus, rng.random())?;
    let opts = FeasibilityOptions::default();
    let rc_in = coherence_number(&rho, &opts)?.value;
    let rc_out = coherence_number(&channel.apply(&rho)?, &opts)?.value;
    let mut branch_max = 0;
    for (_, branch) in channel.apply_selective(&rho)? {
        branch_max = branch_max.max(coherence_number(&branch, &opts)?.value);
    }
    let mut c = Check::new(format!(
        "d={d} kraus={n_kraus} rc_in={rc_in} rc_out={rc_out} branch_max={branch_max}"
    ));
    c.excess(rc_out as f64 - rc_in as f64);
    c.excess(branch_max as f64 - rc_in as f64);
    let diagonal = rho.is_diagonal(1e-12);
    c.note((rc_in == 1) != diagonal, || {
        format!("r_C = {rc_in} but diagonal = {diagonal}")
    });
    let probs: Vec<f64> = (0..d).map(|i| rho.entry(i, i).re).collect();
    let image = channel.apply(&DensityMatrix::diagonal(&probs)?)?;
    c.note(!image.is_diagonal(1e-12), || {
        "channel maps a diagonal state off the diagonal".into()
    });
    Ok(c)
}

fn theorem2_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 3 + case % 2;
    let (rho, kind) = if case % 2 == 0 {
        let l = rng.random_range(1..=d);
        (
            random_supported_pure(rng, d, l).projector(),
            format!("pure rank {l}"),
        )
    } else {
        (random_density_with(rng, d, 2), "mixed rank 2".to_string())
    };
    let (channel, chan) = if case % 4 < 2 {
        (conversion_channel(d)?, "conversion".to_string())
    } else {
        let n = rng.random_range(1..=3);
        (
            random_incoherent_channel(d * d, n, rng.random())?,
            format!("random kraus={n}"),
        )
    };
    let opts = RoofOptions {
        restarts: 4,
        max_iterations: 300,
        seed: rng.random(),
        ..RoofOptions::default()
    };
    let out = theorem2_chain(&rho, &channel, &opts)?;
    let mut c = Check::new(format!("d={d} {kind} {chan}"));
    let values: Vec<f64> = out.k_values.values().copied().collect();
    for w in values.windows(2) {
        c.excess(w[1] - w[0]);
    }
    c.excess(out.k_values[&2] - out.bound);
    if let (Some(b3), Some(c3)) = (out.bound_k3, out.k_values.get(&3)) {
        c.excess(c3 - b3);
    }
    c.excess(out.branch_excess);
    c.excess(out.l1 - out.cc);
    c.note(out.k2_prefactor_smaller == Some(false), || {
        "k=2 prefactor is not the smaller one".into()
    });
    c.notes.extend(out.violations);
    if out.reruns > 0 {
        c.notes
            .push(format!("estimator re-run {} time(s)", out.reruns));
    }
    Ok(c)
}

fn theorem3_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 4;
    let l = 1 + case % 4;
    let rho = random_supported_pure(rng, d, l).projector();
    let mut c = Check::new(format!("d={d} coherence_rank={l}"));
    for k in 2..=d {
        let t = theorem3_verify(&rho, k, &RoofOptions::default())?;
        let margin = if t.expect_nonzero {
            ZERO_THRESHOLD - t.converted_ck
        } else {
            t.converted_ck - ZERO_THRESHOLD
        };
        c.excess(margin);
        c.note(t.coherence_number != l, || {
            format!("coherence number {} != {l}", t.coherence_number)
        });
    }
    Ok(c)
}

/// Rejection-samples a pure state whose amplitudes all have modulus at least `eps`.
fn floored_pure(rng: &mut SeededRng, d: usize, eps: f64) -> PureState {
    loop {
        let psi = random_pure_with(rng, d);
        if psi.amplitudes().iter().all(|z| z.norm() >= eps) {
            return psi;
        }
    }
}

fn theorem4_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 3 + case % 2;
    let eps = 0.1;
    let psi = floored_pure(rng, d, eps);
    let r = theorem4_bounds(&psi, eps)?;
    let mut c = Check::new(format!("d={d} eps={eps}"));
    c.excess(r.lower - r.g_value);
    c.excess(r.g_value - r.upper);
    Ok(c)
}

fn lemma1_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let d = 3 + (case / 5) % 2;
    let l = rng.random_range(1..=d);
    let psi = random_supported_pure(rng, d, l);
    let (channel, chan) = if case % 5 == 0 {
        (conversion_channel(d)?, "conversion".to_string())
    } else {
        let n = rng.random_range(1..=4);
        (
            random_incoherent_channel(d * d, n, rng.random())?,
            format!("random kraus={n}"),
        )
    };
    let out = lemma1_check(&psi, &channel)?;
    let worst = out.branch_schmidt_ranks.iter().copied().max().unwrap_or(0);
    let mut c = Check::new(format!("d={d} coherence_rank={l} {chan}"));
    c.excess(worst as f64 - out.coherence_rank as f64);
    if case % 5 == 0 {
        c.note(worst != out.coherence_rank, || {
            format!("conversion gives rank {worst}, expected equality")
        });
        let schmidt = crate::entanglement::schmidt_rank(
            &convert_pure(&psi)?,
            crate::entanglement::SCHMIDT_TOL,
        );
        c.note(schmidt != l, || {
            format!("converted Schmidt rank {schmidt} != {l}")
        });
    }
    Ok(c)
}

fn grover_params(case: usize, rng: &mut SeededRng) -> GroverParams {
    let (n, m) = match case % 5 {
        0 => {
            let m = rng.random_range(1..=8);
            (4 * m, m)
        }
        1 | 2 => {
            let n = 1usize << rng.random_range(1..=10);
            (n, rng.random_range(1..n.min(17)))
        }
        _ => {
            let n = rng.random_range(2..=1024);
            (n, rng.random_range(1..n.min(17)))
        }
    };
    GroverParams::new(n, m).expect("valid grid point")
}

fn grover_case(case: usize, rng: &mut SeededRng) -> Result<Check> {
    let p = grover_params(case, rng);
    let (n, m) = (p.n_items, p.n_targets);
    let crit = critical_iteration(&p);
    let mut c = Check::new(format!(
        "N={n} m={m} r*={:.6} integer_hit={}",
        crit.r_star, crit.integer_hit
    ));
    let last = crit.r_star.ceil() as usize;
    let floor = crit.r_star.floor() as usize;
    let mut previous = f64::INFINITY;
    for r in 0..=last {
        let rf = r as f64;
        let psi = grover_state(&p, rf);
        let closed = ccN_closed_form(&p, rf);
        c.excess((closed - ccN_pure(&psi)).abs());
        c.excess(
            (success_probability(&p, rf) - (psi.probabilities()[..m].iter().sum::<f64>())).abs(),
        );
        if r <= floor {
            c.note(closed > previous + 1e-15, || format!("ccN rises at r={r}"));
            previous = closed;
        }
        let rank = coherence_rank(&psi, RANK_TOL);
        let at_hit = crit.integer_hit && r == crit.r_star.round() as usize;
        let a = crate::grover::alpha(&p, rf);
        let expected = if at_hit || a.cos().abs() < 1e-12 {
            m
        } else if a.sin().abs() < 1e-12 {
            n - m
        } else {
            n
        };
        c.note(rank != expected, || {
            format!("coherence rank {rank} at r={r}, expected {expected}")
        });
        if at_hit {
            let l1 = l1_coherence_pure(&psi);
            c.note((l1 > 1e-12) != (m > 1), || {
                format!("l1 = {l1:.3e} at r* with m = {m}")
            });
            c.excess(closed);
        }
    }
    c.excess((ccN_closed_form(&p, 0.0) - 1.0).abs());
    for i in 0..50 {
        let r = if i == 49 {
            crit.r_star
        } else {
            crit.r_star * i as f64 / 49.0
        };
        let slope = ccN_derivative(&p, r);
        c.note(slope > 1e-12, || {
            format!("positive slope {slope:.3e} at r={r:.4}")
        });
    }
    if n.is_power_of_two() && n <= 1 << 10 {
        let bits = n.trailing_zeros() as usize;
        let targets: Vec<usize> = sample(rng, n, m).into_vec();
        for r in [0, floor, last, last + 3] {
            c.excess(statevector_deviation(bits, &targets, r)?);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        for s in Suite::ALL {
            let cfg = VerifyConfig {
                cases: 6,
                ..VerifyConfig::for_suite(s, 11)
            };
            let a = run_suite(s, &cfg).unwrap();
            assert!(
                a.passed,
                "{}: {:?}",
                s.name(),
                a.results.iter().filter(|r| !r.ok).collect::<Vec<_>>()
            );
            let b = run_suite(s, &cfg).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = VerifyConfig {
            seed: 1,
            cases: 3,
            tolerance: -1.0,
        };
        assert!(run_suite(Suite::Maclaurin, &cfg).is_err());
        let cfg = VerifyConfig {
            seed: 1,
            cases: 0,
            tolerance: 1.0,
        };
        assert!(run_suite(Suite::Maclaurin, &cfg).is_err());
    }
}
