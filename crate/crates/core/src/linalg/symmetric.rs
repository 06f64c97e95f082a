use itertools::Itertools;

use crate::error::{argument, Result};

/// Inputs longer than this use the running-product recurrence.
const ENUMERATION_LIMIT: usize = 20;

/// Elementary symmetric polynomial `S_k(values)`: the sum of all products of
/// `k` distinct entries. `S_0 = 1`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return argument(format!("order {k} exceeds {} inputs", values.len()));
    }
    if values.len() > ENUMERATION_LIMIT {
        return Ok(elementary_symmetric_recurrence(values)[k]);
    }
    Ok(elementary_symmetric_enumerated(values, k))
}

pub(crate) fn elementary_symmetric_enumerated(values: &[f64], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    values
        .iter()
        .combinations(k)
        .map(|c| c.into_iter().product::<f64>())
        .sum()
}

/// All `S_0..=S_n` via `e_j <- e_j + x e_{j-1}`, which involves only
/// additions of like-signed terms for nonnegative inputs.
pub fn elementary_symmetric_recurrence(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `S_{k-1}` of `values` with entry `skip` removed; the partial derivative of
/// `S_k` with respect to that entry.
pub(crate) fn elementary_symmetric_without(values: &[f64], skip: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let rest: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &v)| v)
        .collect();
    elementary_symmetric_recurrence(&rest)[k - 1]
}
