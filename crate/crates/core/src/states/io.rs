//! JSON state files.
//!
//! Pure: `{"dim": d, "amplitudes": [[re, im], ...]}`
//! Density: `{"dim": d, "matrix": [[[re, im], ...], ...]}`

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::density::DensityMatrix;
use super::pure::PureState;
use crate::error::{validation, Result};
use crate::linalg::ComplexMatrix;

/// A state read from a file.
#[derive(Debug, Clone)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn dim(&self) -> usize {
        match self {
            StateInput::Pure(p) => p.dim(),
            StateInput::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            StateInput::Pure(p) => p.projector(),
            StateInput::Mixed(r) => r.clone(),
        }
    }
}

fn pair(v: &Value, path: &str) -> Result<Complex64> {
    let arr = match v.as_array() {
        Some(a) if a.len() == 2 => a,
        _ => return validation(format!("{path}: expected a [re, im] pair")),
    };
    match (arr[0].as_f64(), arr[1].as_f64()) {
        (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
        _ => validation(format!("{path}: [re, im] entries must be finite numbers")),
    }
}

fn pairs(v: &Value, path: &str, expect: usize) -> Result<Vec<Complex64>> {
    let arr = match v.as_array() {
        Some(a) => a,
        None => return validation(format!("{path}: expected an array")),
    };
    if arr.len() != expect {
        return validation(format!(
            "{path}: expected {expect} entries, found {}",
            arr.len()
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| pair(x, &format!("{path}[{i}]")))
        .collect()
}

/// Parses and validates a state document.
pub fn parse_state(value: &Value) -> Result<StateInput> {
    let obj: &Map<String, Value> = match value.as_object() {
        Some(o) => o,
        None => return validation("state file must be a JSON object"),
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "dim" | "amplitudes" | "matrix") {
            return validation(format!("unknown field `{key}`"));
        }
    }
    let dim = match obj.get("dim").and_then(Value::as_u64) {
        Some(d) if d >= 1 => d as usize,
        _ => return validation("`dim` must be a positive integer"),
    };
    match (obj.get("amplitudes"), obj.get("matrix")) {
        (Some(a), None) => {
            let amps = pairs(a, "amplitudes", dim)?;
            let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-8 {
                return validation(format!("amplitudes have norm {norm}, expected 1"));
            }
            Ok(StateInput::Pure(PureState::new(amps)?))
        }
        (None, Some(m)) => {
            let rows = match m.as_array() {
                Some(r) if r.len() == dim => r,
                _ => return validation(format!("matrix: expected {dim} rows")),
            };
            let mut data = Vec::with_capacity(dim * dim);
            for (i, row) in rows.iter().enumerate() {
                data.extend(pairs(row, &format!("matrix[{i}]"), dim)?);
            }
            Ok(StateInput::Mixed(DensityMatrix::new(
                ComplexMatrix::from_vec(dim, dim, data)?,
            )?))
        }
        (Some(_), Some(_)) => validation("state file has both `amplitudes` and `matrix`"),
        (None, None) => validation("state file needs `amplitudes` or `matrix`"),
    }
}

pub fn load_state(path: &Path) -> Result<StateInput> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    parse_state(&value)
}

fn to_pair(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn pure_to_json(psi: &PureState) -> Value {
    json!({
        "dim": psi.dim(),
        "amplitudes": psi.amplitudes().iter().map(to_pair).collect::<Vec<_>>(),
    })
}

pub fn density_to_json(rho: &DensityMatrix) -> Value {
    let d = rho.dim();
    let rows: Vec<Value> = (0..d)
        .map(|i| Value::Array(rho.matrix().row(i).iter().map(to_pair).collect()))
        .collect();
    json!({ "dim": d, "matrix": rows })
}
