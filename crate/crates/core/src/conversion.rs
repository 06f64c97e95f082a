//! Converting coherence of a system `S` into entanglement between `S` and an
//! ancilla `A` of the same dimension.
//!
//! The conversion unitary acts as `U |i⟩|j⟩ = |i⟩|i ⊕ j⟩` (zero-based,
//! addition mod `d`), so `U(|ψ⟩ ⊗ |0⟩) = Σ_i ψ_i |ii⟩`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherence::{
    cc_mixed, certificate_decomposition, coherence_concurrence_pure, coherence_number,
    coherence_rank, FeasibilityOptions, RANK_TOL,
};
use crate::entanglement::{
    g_concurrence_pure, k_concurrence_mixed_seeded, k_concurrence_pure, schmidt_rank,
    BipartitePure, KConcurrence, SCHMIDT_TOL, ZERO_THRESHOLD,
};
use crate::error::{argument, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::roof::{PureMeasure, RoofOptions};
use crate::states::{
    attach_ancilla, attach_ancilla_pure, Decomposition, DensityMatrix, IncoherentChannel, PureState,
};

/// Slack allowed on the inequality checks.
pub const CHAIN_SLACK: f64 = 1e-7;
/// Restart multiplier for re-running a flagged estimate.
pub const RERUN_FACTOR: usize = 8;

/// `U = Σ_{i,j} |i⟩⟨i| ⊗ |i ⊕ j⟩⟨j|` on `d ⊗ d`.
pub fn conversion_unitary(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return argument("conversion needs d >= 2");
    }
    let n = d * d;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            u[(i * d + (i + j) % d, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(u)
}

/// The conversion as an incoherent channel with the single Kraus operator `U`.
pub fn conversion_channel(d: usize) -> Result<IncoherentChannel> {
    IncoherentChannel::new(vec![conversion_unitary(d)?])
}

/// `U (ρ ⊗ |0⟩⟨0|) U†`.
pub fn convert(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let u = conversion_unitary(rho.dim())?;
    let big = attach_ancilla(rho);
    DensityMatrix::new(u.matmul(big.matrix()).matmul(&u.adjoint()).hermitian_part())
}

/// `U (|ψ⟩ ⊗ |0⟩)` as a bipartite amplitude matrix, which is `diag(ψ)`.
pub fn convert_pure(psi: &PureState) -> Result<BipartitePure> {
    let u = conversion_unitary(psi.dim())?;
    let out = u.matvec(attach_ancilla_pure(psi).amplitudes());
    BipartitePure::from_state(&PureState::new(out)?)
}

fn push_decomposition(dec: &Decomposition, channel: &IncoherentChannel) -> Result<Decomposition> {
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for (p, psi) in dec.iter() {
        for (q, phi) in channel.apply_pure(&attach_ancilla_pure(psi))? {
            weights.push(p * q);
            states.push(phi);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(Decomposition { weights, states })
}

fn check_channel(channel: &IncoherentChannel, d: usize) -> Result<()> {
    if channel.in_dim() != d * d || channel.out_dim() != d * d {
        return argument(format!(
            "channel must act on the {d} x {d} system+ancilla space (got {} -> {})",
            channel.in_dim(),
            channel.out_dim()
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Outcome {
    pub coherence_rank: usize,
    pub branch_schmidt_ranks: Vec<usize>,
    pub ok: bool,
}

/// Schmidt rank of every branch `K_n(|ψ⟩ ⊗ |0⟩)` against `r_C(ψ)`.
pub fn lemma1_check(psi: &PureState, channel: &IncoherentChannel) -> Result<Lemma1Outcome> {
    let d = psi.dim();
    check_channel(channel, d)?;
    let rc = coherence_rank(psi, RANK_TOL);
    let mut ranks = Vec::new();
    for (_, phi) in channel.apply_pure(&attach_ancilla_pure(psi))? {
        ranks.push(schmidt_rank(&BipartitePure::from_state(&phi)?, SCHMIDT_TOL));
    }
    let ok = ranks.iter().all(|&r| r <= rc);
    Ok(Lemma1Outcome {
        coherence_rank: rc,
        branch_schmidt_ranks: ranks,
        ok,
    })
}

/// `√(d / (2(d−1)))`.
pub fn k2_prefactor(d: usize) -> f64 {
    let d = d as f64;
    (d / (2.0 * (d - 1.0))).sqrt()
}

/// `(3d² / (4(d−1)(d−2)))^(1/3)`, defined for `d ≥ 3`.
pub fn k3_prefactor(d: usize) -> Option<f64> {
    (d >= 3).then(|| {
        let d = d as f64;
        (3.0 * d * d / (4.0 * (d - 1.0) * (d - 2.0))).cbrt()
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConversionOutcome {
    pub dim: usize,
    pub input_rc: usize,
    pub output: DensityMatrix,
    /// `C_k` of the output for `2 ≤ k ≤ d`; upper-bound estimates unless the
    /// output is pure.
    pub k_values: BTreeMap<usize, f64>,
    pub k_values_exact: bool,
    pub cc: f64,
    pub cc_exact: bool,
    pub l1: f64,
    pub prefactor_k2: f64,
    pub bound: f64,
    pub prefactor_k3: Option<f64>,
    pub bound_k3: Option<f64>,
    /// `√(d/(2(d−1))) < (3d²/(4(d−1)(d−2)))^(1/3)`.
    pub k2_prefactor_smaller: Option<bool>,
    /// Worst `avg C_2` of pushed branches minus its bound, per decomposition element.
    pub branch_excess: f64,
    pub chain_ok: bool,
    pub k3_ok: Option<bool>,
    pub reruns: usize,
    pub violations: Vec<String>,
}

struct ChainValues {
    k_values: BTreeMap<usize, f64>,
    exact: bool,
}

fn chain_values(
    output: &DensityMatrix,
    d: usize,
    pushed: &Decomposition,
    opts: &RoofOptions,
) -> Result<ChainValues> {
    if let Some(phi) = output.as_pure(1e-10) {
        let b = BipartitePure::from_state(&phi)?;
        let k_values = (2..=d)
            .map(|k| Ok((k, k_concurrence_pure(&b, k)?)))
            .collect::<Result<_>>()?;
        return Ok(ChainValues {
            k_values,
            exact: true,
        });
    }
    let mut pool = vec![pushed.clone()];
    for k in 2..=d {
        let est = k_concurrence_mixed_seeded(output, k, opts, std::slice::from_ref(pushed))?;
        pool.push(est.decomposition);
    }
    let mut k_values = BTreeMap::new();
    for k in 2..=d {
        let m = KConcurrence::new(d, k)?;
        let best = pool
            .iter()
            .map(|dec| dec.average(|s| m.value(s)))
            .fold(f64::INFINITY, f64::min);
        k_values.insert(k, best);
    }
    Ok(ChainValues {
        k_values,
        exact: false,
    })
}

/// Evaluates the bound chain `G_d ≤ C_{d−1} ≤ ... ≤ C_2 ≤ √(d/(2(d−1))) C_c(ρ)`
/// and the `k = 3` bound for `Λ[ρ ⊗ |0⟩⟨0|]`.
pub fn theorem2_chain(
    rho: &DensityMatrix,
    channel: &IncoherentChannel,
    opts: &RoofOptions,
) -> Result<ConversionOutcome> {
    let d = rho.dim();
    if d < 2 {
        return argument("conversion needs d >= 2");
    }
    check_channel(channel, d)?;
    let input_rc = coherence_number(rho, &FeasibilityOptions::default())?.value;
    let (cc, cc_exact, cc_dec) = match rho.as_pure(1e-10) {
        Some(psi) => (
            coherence_concurrence_pure(&psi),
            true,
            Decomposition::single(psi),
        ),
        None => {
            let est = cc_mixed(rho, opts)?;
            (est.value, false, est.decomposition)
        }
    };
    let output = channel.apply(&attach_ancilla(rho))?;
    let pushed = push_decomposition(&cc_dec, channel)?;
    let c2 = KConcurrence::new(d, 2)?;
    let pref2 = k2_prefactor(d);
    let mut branch_excess = f64::NEG_INFINITY;
    for (_, psi) in cc_dec.iter() {
        let branches = channel.apply_pure(&attach_ancilla_pure(psi))?;
        let avg: f64 = branches.iter().map(|(q, phi)| q * c2.value(phi)).sum();
        branch_excess = branch_excess.max(avg - pref2 * coherence_concurrence_pure(psi));
    }

    let pref3 = k3_prefactor(d);
    let bound = pref2 * cc;
    let bound3 = pref3.map(|p| p * cc);
    let evaluate = |vals: &ChainValues| -> Vec<String> {
        let mut v = Vec::new();
        let ks: Vec<usize> = vals.k_values.keys().copied().collect();
        for w in ks.windows(2) {
            let (a, b) = (vals.k_values[&w[0]], vals.k_values[&w[1]]);
            if b > a + CHAIN_SLACK {
                v.push(format!("C_{} = {b:.3e} exceeds C_{} = {a:.3e}", w[1], w[0]));
            }
        }
        let c2v = vals.k_values[&2];
        if c2v > bound + CHAIN_SLACK {
            v.push(format!("C_2 = {c2v:.3e} exceeds bound {bound:.3e}"));
        }
        if let (Some(b3), Some(c3)) = (bound3, vals.k_values.get(&3)) {
            if *c3 > b3 + CHAIN_SLACK {
                v.push(format!("C_3 = {c3:.3e} exceeds k=3 bound {b3:.3e}"));
            }
        }
        v
    };

    let mut vals = chain_values(&output, d, &pushed, opts)?;
    let mut violations = evaluate(&vals);
    let mut reruns = 0;
    if !violations.is_empty() && !vals.exact {
        reruns = 1;
        let wide = opts.with_restarts(opts.restarts.max(1) * RERUN_FACTOR);
        vals = chain_values(&output, d, &pushed, &wide)?;
        violations = evaluate(&vals);
    }
    if branch_excess > CHAIN_SLACK {
        violations.push(format!(
            "pushed branches exceed the pure-state bound by {branch_excess:.3e}"
        ));
    }
    let k3_ok = bound3.map(|b3| {
        vals.k_values
            .get(&3)
            .is_none_or(|c3| *c3 <= b3 + CHAIN_SLACK)
    });
    Ok(ConversionOutcome {
        dim: d,
        input_rc,
        output,
        k_values: vals.k_values,
        k_values_exact: vals.exact,
        cc,
        cc_exact,
        l1: crate::coherence::l1_coherence(rho),
        prefactor_k2: pref2,
        bound,
        prefactor_k3: pref3,
        bound_k3: bound3,
        k2_prefactor_smaller: pref3.map(|p3| pref2 < p3),
        branch_excess,
        chain_ok: violations.is_empty(),
        k3_ok,
        reruns,
        violations,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem3Outcome {
    pub k: usize,
    pub coherence_number: usize,
    pub converted_ck: f64,
    pub converted_exact: bool,
    pub expect_nonzero: bool,
    pub ok: bool,
}

/// Checks `C_k(U(ρ ⊗ |0⟩⟨0|)U†) > 0 ⇔ r_C(ρ) ≥ k` with the zero threshold
/// `1e-7`.
pub fn theorem3_verify(
    rho: &DensityMatrix,
    k: usize,
    opts: &RoofOptions,
) -> Result<Theorem3Outcome> {
    let d = rho.dim();
    if k < 2 || k > d {
        return argument(format!("k must satisfy 2 <= k <= {d} (got {k})"));
    }
    let rc = coherence_number(rho, &FeasibilityOptions::default())?;
    let (value, exact) = match rho.as_pure(1e-10) {
        Some(psi) => (k_concurrence_pure(&convert_pure(&psi)?, k)?, true),
        None => {
            let channel = conversion_channel(d)?;
            let seeds: Vec<Decomposition> = rc
                .certificate
                .as_ref()
                .and_then(certificate_decomposition)
                .map(|dec| push_decomposition(&dec, &channel))
                .transpose()?
                .into_iter()
                .collect();
            let out = convert(rho)?;
            (
                k_concurrence_mixed_seeded(&out, k, opts, &seeds)?.value,
                false,
            )
        }
    };
    let expect_nonzero = rc.value >= k;
    let ok = (value > ZERO_THRESHOLD) == expect_nonzero;
    Ok(Theorem3Outcome {
        k,
        coherence_number: rc.value,
        converted_ck: value,
        converted_exact: exact,
        expect_nonzero,
        ok,
    })
}

/// Specht ratio `S(h) = (h−1) h^{1/(h−1)} / (e ln h)` at `h = 1/ε²`,
/// evaluated through `x = ln h` so that `ε → 1` is stable.
pub fn specht_ratio(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return argument(format!("eps must lie in (0, 1] (got {eps})"));
    }
    let x = -2.0 * eps.ln();
    if x == 0.0 {
        return Ok(1.0);
    }
    let em1 = x.exp_m1();
    Ok(em1 / x * (x / em1 - 1.0).exp())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpechtBoundReport {
    pub eps: f64,
    pub specht: f64,
    pub cc: f64,
    pub lower: f64,
    pub upper: f64,
    pub g_value: f64,
    pub ok: bool,
}

/// `C_c/(S(ε)(d−1)) ≤ G_d(U(ψ ⊗ |0⟩)) ≤ C_c/(d−1)` for a pure `ψ` whose
/// amplitudes all have modulus at least `ε`.
pub fn theorem4_bounds(psi: &PureState, eps: f64) -> Result<SpechtBoundReport> {
    let specht = specht_ratio(eps)?;
    let d = psi.dim();
    if d < 2 {
        return argument("conversion needs d >= 2");
    }
    if let Some((i, z)) = psi
        .amplitudes()
        .iter()
        .enumerate()
        .find(|(_, z)| z.norm() < eps)
    {
        return Err(Error::Precondition(format!(
            "|ψ_{i}| = {:.3e} is below eps = {eps}",
            z.norm()
        )));
    }
    let cc = coherence_concurrence_pure(psi);
    let g_value = g_concurrence_pure(&convert_pure(psi)?);
    let upper = cc / (d as f64 - 1.0);
    let lower = upper / specht;
    let ok = lower <= g_value + 1e-8 && g_value <= upper + 1e-8;
    Ok(SpechtBoundReport {
        eps,
        specht,
        cc,
        lower,
        upper,
        g_value,
        ok,
    })
}
