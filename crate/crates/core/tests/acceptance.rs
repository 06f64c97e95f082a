use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cohlab::coherence::{ccN_pure, coherence_number, coherence_rank, FeasibilityOptions, RANK_TOL};
use cohlab::conversion::specht_ratio;
use cohlab::entanglement::{k_concurrence_pure, k_concurrence_via_compound, BipartitePure};
use cohlab::grover::{
    ccN_derivative, cost_performance, critical_iteration, grover_angle, grover_state,
    statevector_simulate, trajectory, GroverParams,
};
use cohlab::states::{
    density_from, random_pure, rng_from_seed, Decomposition, DensityMatrix, PureState,
};
use cohlab::verify::{run_suite, Suite, VerifyConfig};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 0x5eed;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.ok);
    let detail = parts
        .iter()
        .map(|p| {
            if p.ok {
                p.detail.clone()
            } else {
                format!("FAILED {}", p.detail)
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { ok, detail }
}

fn grover_trajectory_1024() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_cohlab"))
        .args(["grover", "1024", "5", "10"])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    if out.status.code() != Some(0) {
        return check(false, format!("exit {:?}", out.status.code()));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|s| s.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let p = GroverParams::new(1024, 5).unwrap();
    let targets: Vec<usize> = (0..5).collect();
    let expanded_dev = rows
        .iter()
        .map(|row| {
            let psi = statevector_simulate(10, &targets, row[0] as usize).unwrap();
            (ccN_pure(&psi) - row[4]).abs()
        })
        .fold(0.0, f64::max);
    let ccn: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    let prob: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    all(vec![
        check(rows.len() == 11, format!("{} rows", rows.len())),
        check(ccn[0] == 1.0, format!("ccN(0) = {}", ccn[0])),
        check(prob[0] == 5.0 / 1024.0, format!("P(0) = {}", prob[0])),
        check(
            ccn.windows(2).all(|w| w[1] < w[0]),
            "ccN strictly decreasing",
        ),
        check(
            prob.windows(2).all(|w| w[1] > w[0]),
            "P strictly increasing",
        ),
        check(
            expanded_dev <= 1e-9,
            format!("max |ccN - ccN(statevector)| = {expanded_dev:.2e}"),
        ),
        check(elapsed < Duration::from_secs(5), format!("{:.2?}", elapsed)),
        check(critical_iteration(&p).r_star > 10.0, "r* beyond sweep"),
    ])
}

fn grover_smallest_case() -> Outcome {
    let p = GroverParams::new(4, 1).unwrap();
    let crit = critical_iteration(&p);
    let run = trajectory(&p, 1);
    let last = &run.points[1];
    let sv = statevector_simulate(2, &[0], 1).unwrap();
    let expanded = grover_state(&p, 1.0);
    let sv_dev = sv
        .amplitudes()
        .iter()
        .zip(expanded.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    all(vec![
        check(
            crit.integer_hit && (crit.r_star - 1.0).abs() < 1e-12,
            format!("r* = {}", crit.r_star),
        ),
        check((last.p - 1.0).abs() <= 1e-12, format!("P(1) = {}", last.p)),
        check(last.ccn <= 1e-12, format!("ccN(1) = {:.2e}", last.ccn)),
        check(
            run.points[0].coherence_number == 4 && last.coherence_number == 1,
            format!(
                "rank {} -> {}",
                run.points[0].coherence_number, last.coherence_number
            ),
        ),
        check(
            sv_dev <= 1e-12,
            format!("statevector amplitude deviation {sv_dev:.2e}"),
        ),
    ])
}

fn k_concurrence_dual_formula() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..1000u64 {
        let d = 2 + case as usize % 4;
        let psi = BipartitePure::from_state(&random_pure(d * d, SEED ^ case).unwrap()).unwrap();
        for k in 2..=d {
            let a = k_concurrence_pure(&psi, k).unwrap();
            let b = k_concurrence_via_compound(&psi, k).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    all(vec![
        check(
            worst <= 1e-8,
            format!("1000 states, max deviation {worst:.2e}"),
        ),
        check(
            elapsed < Duration::from_secs(30),
            format!("{:.2?}", elapsed),
        ),
    ])
}

fn suite(s: Suite, cases: usize) -> Outcome {
    let start = Instant::now();
    let cfg = VerifyConfig {
        cases,
        ..VerifyConfig::for_suite(s, SEED)
    };
    match run_suite(s, &cfg) {
        Ok(r) => check(
            r.violations == 0,
            format!(
                "{} x{}: {} violations, max residual {:.2e}, tol {:.0e}, {:.1?}",
                s.name(),
                r.cases,
                r.violations,
                r.max_residual,
                r.tolerance,
                start.elapsed()
            ),
        ),
        Err(e) => check(false, format!("{}: {e}", s.name())),
    }
}

fn conversion_chain_suites() -> Outcome {
    all([
        Suite::Maclaurin,
        Suite::Theorem2,
        Suite::Theorem4,
        Suite::Lemma1,
    ]
    .into_iter()
    .map(|s| suite(s, 200))
    .collect())
}

fn random_support_state(rng: &mut impl Rng, d: usize) -> (PureState, usize) {
    loop {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        let mut support = 0;
        for z in amps.iter_mut() {
            if rng.random_bool(0.6) {
                *z = Complex64::new(rng.random_range(0.1..1.0), rng.random_range(-1.0..1.0));
                support += 1;
            }
        }
        if support > 0 {
            return (PureState::new(amps).unwrap(), support);
        }
    }
}

fn coherence_number_cases() -> Outcome {
    let opts = FeasibilityOptions::default();
    let mut rng = rng_from_seed(SEED);
    let mut incoherent_ok = true;
    for d in 2..=5 {
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let rho =
            DensityMatrix::diagonal(&w.iter().map(|x| x / total).collect::<Vec<_>>()).unwrap();
        incoherent_ok &= coherence_number(&rho, &opts).unwrap().value == 1;
    }
    let mut pure_bad = 0;
    for case in 0..500 {
        let d = 2 + case % 5;
        let (psi, support) = random_support_state(&mut rng, d);
        let r = coherence_number(&psi.projector(), &opts).unwrap();
        if r.value != support || support != coherence_rank(&psi, RANK_TOL) {
            pure_bad += 1;
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = PureState::from_real(&[h, h, 0.0]).unwrap();
    let b = PureState::from_real(&[0.0, h, h]).unwrap();
    let mix = density_from(&Decomposition::new(vec![0.5, 0.5], vec![a, b]).unwrap()).unwrap();
    let r = coherence_number(&mix, &opts).unwrap();
    let residual = r.certificate.as_ref().map_or(f64::INFINITY, |c| c.residual);
    all(vec![
        check(incoherent_ok, "incoherent states give 1"),
        check(
            pure_bad == 0,
            format!("500 pure states, {pure_bad} rank mismatches"),
        ),
        check(
            r.value == 2 && residual <= 1e-7,
            format!("two-subset mixture {} (residual {residual:.2e})", r.value),
        ),
    ])
}

fn cost_performance_checks() -> Outcome {
    let p = GroverParams::new(1024, 5).unwrap();
    let at_one = cost_performance(&p, 1.0).unwrap();
    let mut worst_rel: f64 = 0.0;
    for i in 0..=89 {
        let prob = 0.1 + 0.01 * i as f64;
        let w = cost_performance(&p, prob).unwrap();
        worst_rel = worst_rel.max((w.exact - w.asymptotic).abs() / w.exact);
    }
    let f = 5.0 / 1024.0;
    let interior: Vec<f64> = (1..200).map(|i| f + (1.0 - f) * i as f64 / 200.0).collect();
    let positive = interior
        .iter()
        .all(|&q| cost_performance(&p, q).unwrap().exact > 0.0);

    let a = grover_angle(&p);
    let mut worst_chain: f64 = 0.0;
    for &q in interior.iter().step_by(10) {
        let r = q.sqrt().asin() / a - 0.5;
        let dp = a * (2.0 * (r + 0.5) * a).sin();
        let dc = ccN_derivative(&p, r);
        let w = cost_performance(&p, q).unwrap().exact;
        worst_chain = worst_chain.max((w + dp / dc).abs() / w);
    }
    let below = cost_performance(&p, f).is_err();
    all(vec![
        check(
            at_one.exact.abs() <= 1e-12,
            format!("w(1) = {}", at_one.exact),
        ),
        check(
            worst_rel <= 0.01,
            format!("max exact/asymptotic gap {:.3}%", 100.0 * worst_rel),
        ),
        check(positive, "w > 0 on (m/N, 1)"),
        check(
            worst_chain <= 1e-8,
            format!("w = -P'/C' within {worst_chain:.1e}"),
        ),
        check(below, "P = m/N rejected"),
    ])
}

fn specht_direct(eps: f64) -> f64 {
    let h = 1.0 / (eps * eps);
    (h - 1.0) * h.powf(1.0 / (h - 1.0)) / (std::f64::consts::E * h.ln())
}

fn specht_checks() -> Outcome {
    let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
    let mut bounded = true;
    let mut worst: f64 = 0.0;
    for &e in &grid {
        let s = specht_ratio(e).unwrap();
        bounded &= s <= 1.0 / (e * e) + 1e-12 && s >= 1.0 - 1e-12;
        if e <= 0.9 {
            worst = worst.max((s - specht_direct(e)).abs() / s);
        }
    }
    let near = specht_ratio(1.0 - 1e-6).unwrap() - 1.0;
    all(vec![
        check(bounded, "1 <= S(eps) <= 1/eps^2 on 100 points"),
        check(
            worst <= 1e-10,
            format!("matches direct form within {worst:.1e}"),
        ),
        check(near.abs() <= 1e-4, format!("S(1-1e-6) - 1 = {near:.2e}")),
    ])
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("grover trajectory N=1024 m=5", grover_trajectory_1024),
        (
            "grover N=4 m=1 reaches zero coherence",
            grover_smallest_case,
        ),
        ("k-concurrence dual formula", k_concurrence_dual_formula),
        ("conversion chain suites", conversion_chain_suites),
        ("coherence number preserved by conversion", || {
            suite(Suite::Theorem3, 200)
        }),
        (
            "coherence number monotone under incoherent operations",
            || suite(Suite::Theorem1, 200),
        ),
        ("coherence number values", coherence_number_cases),
        ("cost-performance w", cost_performance_checks),
        ("specht ratio", specht_checks),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.into_iter().enumerate() {
        let o = f();
        println!(
            "criterion {}: {} {name} ({})",
            n + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.ok);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
