//! Coherence depletion along Grover iterations.
//!
//! With `N` items and `m` targets (canonically the first `m` basis states),
//! `G^r |ψ_0⟩ = sin α_r |X⟩ + cos α_r |X^⊥⟩` where `α_r = (r + ½) A` and
//! `A = arccos((N − 2m)/N)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{coherence_rank, l1_coherence_pure, relative_entropy_pure, RANK_TOL};
use crate::error::{argument, Error, Result};
use crate::states::PureState;

/// `|r* − round(r*)|` below this counts as an integer critical iteration.
pub const INTEGER_HIT_TOL: f64 = 1e-9;
pub const MAX_QUBITS: usize = 20;
pub const DENSE_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverParams {
    pub n_items: usize,
    pub n_targets: usize,
}

impl GroverParams {
    pub fn new(n_items: usize, n_targets: usize) -> Result<Self> {
        if n_targets < 1 || n_targets >= n_items {
            return argument(format!("need 1 <= m < N (got N={n_items}, m={n_targets})"));
        }
        Ok(Self { n_items, n_targets })
    }

    fn nm(&self) -> (f64, f64) {
        (self.n_items as f64, self.n_targets as f64)
    }
}

/// `A = arccos((N − 2m)/N)`.
pub fn grover_angle(p: &GroverParams) -> f64 {
    let (n, m) = p.nm();
    ((n - 2.0 * m) / n).acos()
}

/// `A = 2 arctan √(m/(N−m))`.
pub fn grover_angle_atan(p: &GroverParams) -> f64 {
    let (n, m) = p.nm();
    2.0 * (m / (n - m)).sqrt().atan()
}

pub fn alpha(p: &GroverParams, r: f64) -> f64 {
    (r + 0.5) * grover_angle(p)
}

/// `P(r) = sin²α_r`; `P(0) = m/N` exactly.
pub fn success_probability(p: &GroverParams, r: f64) -> f64 {
    if r == 0.0 {
        let (n, m) = p.nm();
        return m / n;
    }
    alpha(p, r).sin().powi(2)
}

/// Expanded state: `sin α_r/√m` on targets `0..m`, `cos α_r/√(N−m)` elsewhere.
pub fn grover_state(p: &GroverParams, r: f64) -> PureState {
    let targets: Vec<usize> = (0..p.n_targets).collect();
    grover_state_with_targets(p, r, &targets)
}

fn grover_state_with_targets(p: &GroverParams, r: f64, targets: &[usize]) -> PureState {
    let (n, m) = p.nm();
    let a = alpha(p, r);
    let on = Complex64::new(a.sin() / m.sqrt(), 0.0);
    let off = Complex64::new(a.cos() / (n - m).sqrt(), 0.0);
    let mut amps = vec![off; p.n_items];
    for &t in targets {
        amps[t] = on;
    }
    PureState::new(amps).expect("nonzero amplitudes")
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalIteration {
    pub r_star: f64,
    pub integer_hit: bool,
}

/// `r* = π/(2A) − ½`.
pub fn critical_iteration(p: &GroverParams) -> CriticalIteration {
    let r_star = std::f64::consts::PI / (2.0 * grover_angle(p)) - 0.5;
    CriticalIteration {
        r_star,
        integer_hit: (r_star - r_star.round()).abs() < INTEGER_HIT_TOL,
    }
}

/// `N (sin²α_r/m)^{m/N} (cos²α_r/(N−m))^{(N−m)/N}`, in log space.
#[allow(non_snake_case)]
pub fn ccN_closed_form(p: &GroverParams, r: f64) -> f64 {
    let (n, m) = p.nm();
    let a = alpha(p, r);
    let (s2, c2) = if r == 0.0 {
        (m / n, 1.0 - m / n)
    } else {
        (a.sin().powi(2), a.cos().powi(2))
    };
    if s2 == 0.0 || c2 == 0.0 {
        return 0.0;
    }
    let log = n.ln() + (m / n) * (s2 / m).ln() + ((n - m) / n) * (c2 / (n - m)).ln();
    log.exp()
}

/// `dC/dr = 2A (C/N) (m cos²α − (N−m) sin²α) / (sin α cos α)`.
#[allow(non_snake_case)]
pub fn ccN_derivative(p: &GroverParams, r: f64) -> f64 {
    let (n, m) = p.nm();
    let a = alpha(p, r);
    let c = ccN_closed_form(p, r);
    if c == 0.0 {
        return 0.0;
    }
    let bracket = m - n * success_probability(p, r);
    let cos = if r <= critical_iteration(p).r_star {
        a.cos().abs()
    } else {
        a.cos()
    };
    2.0 * grover_angle(p) * (c / n) * bracket / (a.sin() * cos)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostPerformance {
    pub exact: f64,
    pub asymptotic: f64,
}

/// `w = −dP/dC` as a function of `P`, with its large-`N` form.
pub fn cost_performance(p: &GroverParams, prob: f64) -> Result<CostPerformance> {
    let (n, m) = p.nm();
    let f = m / n;
    if !(prob > f && prob <= 1.0) {
        return Err(Error::Domain(format!(
            "w is defined for m/N < P <= 1 (got P = {prob}, m/N = {f})"
        )));
    }
    if prob == 1.0 {
        return Ok(CostPerformance {
            exact: 0.0,
            asymptotic: 0.0,
        });
    }
    let shared = f * (1.0 - prob).ln() + (1.0 - f) * prob.ln() - (prob - f).ln();
    let exact = (f * m.ln() + (1.0 - f) * (n - m).ln() - n.ln() + shared).exp();
    let asymptotic = (f * f.ln() + shared).exp();
    Ok(CostPerformance { exact, asymptotic })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub r: f64,
    pub alpha_r: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub coherence_number: usize,
    #[serde(rename = "ccN")]
    pub ccn: f64,
    pub l1: f64,
    pub rel_entropy: f64,
    pub w: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroverRun {
    pub params: GroverParams,
    pub critical: CriticalIteration,
    pub points: Vec<TrajectoryPoint>,
}

fn point(p: &GroverParams, r: f64) -> TrajectoryPoint {
    let psi = grover_state(p, r);
    let prob = success_probability(p, r);
    TrajectoryPoint {
        r,
        alpha_r: alpha(p, r),
        p: prob,
        coherence_number: coherence_rank(&psi, RANK_TOL),
        ccn: ccN_closed_form(p, r),
        l1: l1_coherence_pure(&psi),
        rel_entropy: relative_entropy_pure(&psi),
        w: cost_performance(p, prob).ok().map(|w| w.exact),
    }
}

/// Integer iterations `0..=r_max`.
pub fn trajectory(p: &GroverParams, r_max: usize) -> GroverRun {
    let points = (0..=r_max)
        .into_par_iter()
        .map(|r| point(p, r as f64))
        .collect();
    GroverRun {
        params: *p,
        critical: critical_iteration(p),
        points,
    }
}

/// `DENSE_SAMPLES` evenly spaced real `r` on `[0, r*]`.
pub fn dense_trajectory(p: &GroverParams) -> GroverRun {
    let crit = critical_iteration(p);
    let last = (DENSE_SAMPLES - 1) as f64;
    let points = (0..DENSE_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let r = if i + 1 == DENSE_SAMPLES {
                crit.r_star
            } else {
                crit.r_star * i as f64 / last
            };
            point(p, r)
        })
        .collect();
    GroverRun {
        params: *p,
        critical: crit,
        points,
    }
}

/// C-style `%.{precision}g`.
pub fn format_g(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// CSV with header `r,alpha_r,P,coherence_number,ccN,l1,rel_entropy,w`;
/// `deviations`, when given, adds a `max_amp_dev` column.
pub fn trajectory_csv(run: &GroverRun, deviations: Option<&[f64]>) -> String {
    let mut out = String::from("r,alpha_r,P,coherence_number,ccN,l1,rel_entropy,w");
    if deviations.is_some() {
        out.push_str(",max_amp_dev");
    }
    out.push('\n');
    for (i, pt) in run.points.iter().enumerate() {
        let g = |x: f64| format_g(x, 12);
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            g(pt.r),
            g(pt.alpha_r),
            g(pt.p),
            pt.coherence_number,
            g(pt.ccn),
            g(pt.l1),
            g(pt.rel_entropy),
            pt.w.map(g).unwrap_or_default()
        );
        if let Some(dev) = deviations {
            let _ = write!(out, ",{}", g(dev[i]));
        }
        out.push('\n');
    }
    out
}

/// Applies `(2|ψ_0⟩⟨ψ_0| − I) O` `r` times to the uniform state on `n_qubits`.
pub fn statevector_simulate(n_qubits: usize, targets: &[usize], r: usize) -> Result<PureState> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "statevector mode supports at most {MAX_QUBITS} qubits"
        )));
    }
    if n_qubits == 0 {
        return argument("need at least one qubit");
    }
    let n = 1usize << n_qubits;
    let mut marked = vec![false; n];
    for &t in targets {
        if t >= n {
            return argument(format!("target {t} out of range for {n} items"));
        }
        if marked[t] {
            return argument(format!("target {t} listed twice"));
        }
        marked[t] = true;
    }
    if targets.is_empty() || targets.len() == n {
        return argument("targets must be a nonempty proper subset");
    }
    let mut amps = vec![1.0 / (n as f64).sqrt(); n];
    const PAR_THRESHOLD: usize = 1 << 14;
    for _ in 0..r {
        for &t in targets {
            amps[t] = -amps[t];
        }
        let mean = if n >= PAR_THRESHOLD {
            amps.par_iter().sum::<f64>()
        } else {
            amps.iter().sum::<f64>()
        } / n as f64;
        if n >= PAR_THRESHOLD {
            amps.par_iter_mut().for_each(|a| *a = 2.0 * mean - *a);
        } else {
            amps.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
        }
    }
    PureState::new(amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect())
}

/// Largest amplitude difference between statevector simulation and the
/// analytic state with the same target set.
pub fn statevector_deviation(n_qubits: usize, targets: &[usize], r: usize) -> Result<f64> {
    let sim = statevector_simulate(n_qubits, targets, r)?;
    let p = GroverParams::new(1 << n_qubits, targets.len())?;
    let analytic = grover_state_with_targets(&p, r as f64, targets);
    Ok(sim
        .amplitudes()
        .iter()
        .zip(analytic.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
