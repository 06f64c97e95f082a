//! C ABI over `cohlab`.
//!
//! Every fallible function returns a [`CohStatus`]; on failure the message is
//! available from [`coh_last_error_message`] on the calling thread. Handles
//! are opaque and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cohlab::coherence::{coherence_report, FeasibilityOptions, ValueKind};
use cohlab::conversion::specht_ratio;
use cohlab::entanglement::{k_concurrence_pure, BipartitePure};
use cohlab::grover::{
    alpha, ccN_closed_form, ccN_derivative, cost_performance, critical_iteration,
    success_probability, trajectory, trajectory_csv, GroverParams, GroverRun,
};
use cohlab::linalg::ComplexMatrix;
use cohlab::roof::RoofOptions;
use cohlab::states::{parse_state, DensityMatrix, PureState, StateInput};
use cohlab::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Domain = 4,
    Precondition = 5,
    ResourceLimit = 6,
    Io = 7,
    Json = 8,
    Panic = 9,
}

impl From<&Error> for CohStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Validation(_) => CohStatus::Validation,
            Error::Argument(_) => CohStatus::InvalidArgument,
            Error::Domain(_) => CohStatus::Domain,
            Error::Precondition(_) => CohStatus::Precondition,
            Error::ResourceLimit(_) => CohStatus::ResourceLimit,
            Error::Io(_) => CohStatus::Io,
            Error::Json(_) => CohStatus::Json,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CohStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CohStatus::from(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(CohStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CohStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CohStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            CohStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn complex_slice(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Vec<Complex64>, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(im, len))
    };
    Ok((0..len)
        .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
        .collect())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn coh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn coh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(CohStatus::Validation, e.to_string()))
}

/// Opaque quantum state (pure or mixed).
pub struct CohState {
    inner: StateInput,
}

fn box_state(inner: StateInput, out: *mut *mut CohState) -> Result<(), Failure> {
    let out = unsafe { out_ref(out, "out")? };
    *out = Box::into_raw(Box::new(CohState { inner }));
    Ok(())
}

/// Pure state from `dim` amplitudes; `im` may be null for real input.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        let amps = complex_slice(re, im, dim)?;
        box_state(StateInput::Pure(PureState::new(amps)?), out)
    })
}

/// Density matrix from row-major `dim * dim` entries; `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim * dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_state_from_density(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Failure(CohStatus::InvalidArgument, "dim too large".into()))?;
        let entries = complex_slice(re, im, len)?;
        let rho = DensityMatrix::new(ComplexMatrix::from_vec(dim, dim, entries)?)?;
        box_state(StateInput::Mixed(rho), out)
    })
}

/// State from the JSON state-file format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_state_from_json(
    json: *const c_char,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            Failure(
                CohStatus::Validation,
                format!("state JSON is not UTF-8: {e}"),
            )
        })?;
        let value: serde_json::Value = serde_json::from_str(text).map_err(Error::from)?;
        box_state(parse_state(&value)?, out)
    })
}

/// # Safety
/// `state` must come from a `coh_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coh_state_free(state: *mut CohState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_state_dim(state: *const CohState, out: *mut usize) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        *out_ref(out, "out")? = s.inner.dim();
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CohMonotones {
    pub dim: usize,
    pub coherence_number: usize,
    /// 1 when the coherence number is exact, 0 when only bounds are known.
    pub coherence_number_exact: i32,
    pub coherence_number_lower: usize,
    pub coherence_number_upper: usize,
    pub cc: f64,
    pub ccn: f64,
    pub l1: f64,
    pub rel_entropy: f64,
    /// 1 when `cc` and `ccn` are convex-roof upper-bound estimates.
    pub roof_estimates: i32,
}

/// Coherence monotones of `state`; `seed` drives the convex-roof restarts.
///
/// # Safety
/// `state` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_monotones(
    state: *const CohState,
    seed: u64,
    out: *mut CohMonotones,
) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out_ref(out, "out")?;
        let r = coherence_report(
            &s.inner,
            &FeasibilityOptions::default(),
            &RoofOptions::default().with_seed(seed),
            false,
        )?;
        *out = CohMonotones {
            dim: r.dim,
            coherence_number: r.coherence_number,
            coherence_number_exact: i32::from(matches!(r.coherence_number_kind, ValueKind::Exact)),
            coherence_number_lower: r.coherence_number_bounds[0],
            coherence_number_upper: r.coherence_number_bounds[1],
            cc: r.cc,
            ccn: r.ccn,
            l1: r.l1,
            rel_entropy: r.rel_entropy,
            roof_estimates: i32::from(matches!(s.inner, StateInput::Mixed(_))),
        };
        Ok(())
    })
}

/// Full coherence report as JSON; release with `coh_string_free`.
///
/// # Safety
/// `state` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_monotones_json(
    state: *const CohState,
    seed: u64,
    out: *mut *mut c_char,
) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out_ref(out, "out")?;
        let r = coherence_report(
            &s.inner,
            &FeasibilityOptions::default(),
            &RoofOptions::default().with_seed(seed),
            false,
        )?;
        *out = into_c_string(serde_json::to_string(&r).map_err(Error::from)?)?;
        Ok(())
    })
}

/// `C_k` of a pure state on `d ⊗ d` (dimension `d²`).
///
/// # Safety
/// `state` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_k_concurrence(
    state: *const CohState,
    k: usize,
    out: *mut f64,
) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let out = out_ref(out, "out")?;
        let StateInput::Pure(psi) = &s.inner else {
            return Err(Failure(
                CohStatus::InvalidArgument,
                "k-concurrence needs a pure state".into(),
            ));
        };
        *out = k_concurrence_pure(&BipartitePure::from_state(psi)?, k)?;
        Ok(())
    })
}

/// Specht ratio `S(eps)` for `0 < eps <= 1`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_specht_ratio(eps: f64, out: *mut f64) -> CohStatus {
    guard(|| {
        *out_ref(out, "out")? = specht_ratio(eps)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CohGroverPoint {
    pub r: f64,
    pub alpha_r: f64,
    pub success_probability: f64,
    pub ccn: f64,
    pub ccn_derivative: f64,
}

/// Closed-form Grover quantities at real iteration `r`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_grover_point(
    n_items: usize,
    n_targets: usize,
    r: f64,
    out: *mut CohGroverPoint,
) -> CohStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Failure(
                CohStatus::InvalidArgument,
                format!("r must be finite and >= 0 (got {r})"),
            ));
        }
        let p = GroverParams::new(n_items, n_targets)?;
        *out = CohGroverPoint {
            r,
            alpha_r: alpha(&p, r),
            success_probability: success_probability(&p, r),
            ccn: ccN_closed_form(&p, r),
            ccn_derivative: ccN_derivative(&p, r),
        };
        Ok(())
    })
}

/// Critical iteration `r*`; `integer_hit` is set to 1 when `r*` is an integer.
///
/// # Safety
/// `r_star` and `integer_hit` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_grover_critical(
    n_items: usize,
    n_targets: usize,
    r_star: *mut f64,
    integer_hit: *mut i32,
) -> CohStatus {
    guard(|| {
        let c = critical_iteration(&GroverParams::new(n_items, n_targets)?);
        *out_ref(r_star, "r_star")? = c.r_star;
        *out_ref(integer_hit, "integer_hit")? = i32::from(c.integer_hit);
        Ok(())
    })
}

/// Cost performance `w` at success probability `p`, exact and large-`N` forms.
///
/// # Safety
/// `exact` and `asymptotic` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_grover_cost_performance(
    n_items: usize,
    n_targets: usize,
    p: f64,
    exact: *mut f64,
    asymptotic: *mut f64,
) -> CohStatus {
    guard(|| {
        let w = cost_performance(&GroverParams::new(n_items, n_targets)?, p)?;
        *out_ref(exact, "exact")? = w.exact;
        *out_ref(asymptotic, "asymptotic")? = w.asymptotic;
        Ok(())
    })
}

/// Opaque Grover trajectory.
pub struct CohTrajectory {
    run: GroverRun,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CohTrajectoryPoint {
    pub r: f64,
    pub alpha_r: f64,
    pub success_probability: f64,
    pub coherence_number: usize,
    pub ccn: f64,
    pub l1: f64,
    pub rel_entropy: f64,
    /// 0 at `r = 0`, where `w` is undefined.
    pub has_w: i32,
    pub w: f64,
}

/// Integer trajectory `r = 0..=r_max`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_grover_trajectory(
    n_items: usize,
    n_targets: usize,
    r_max: usize,
    out: *mut *mut CohTrajectory,
) -> CohStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let run = trajectory(&GroverParams::new(n_items, n_targets)?, r_max);
        *out = Box::into_raw(Box::new(CohTrajectory { run }));
        Ok(())
    })
}

/// # Safety
/// `t` must come from `coh_grover_trajectory` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coh_trajectory_free(t: *mut CohTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_trajectory_len(t: *const CohTrajectory, out: *mut usize) -> CohStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        *out_ref(out, "out")? = t.run.points.len();
        Ok(())
    })
}

/// # Safety
/// `t` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_trajectory_point(
    t: *const CohTrajectory,
    index: usize,
    out: *mut CohTrajectoryPoint,
) -> CohStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        let out = out_ref(out, "out")?;
        let p = t.run.points.get(index).ok_or_else(|| {
            Failure(
                CohStatus::InvalidArgument,
                format!("index {index} out of range ({} points)", t.run.points.len()),
            )
        })?;
        *out = CohTrajectoryPoint {
            r: p.r,
            alpha_r: p.alpha_r,
            success_probability: p.p,
            coherence_number: p.coherence_number,
            ccn: p.ccn,
            l1: p.l1,
            rel_entropy: p.rel_entropy,
            has_w: i32::from(p.w.is_some()),
            w: p.w.unwrap_or(0.0),
        };
        Ok(())
    })
}

/// Trajectory as CSV; release with `coh_string_free`.
///
/// # Safety
/// `t` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coh_trajectory_csv(
    t: *const CohTrajectory,
    out: *mut *mut c_char,
) -> CohStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        *out_ref(out, "out")? = into_c_string(trajectory_csv(&t.run, None))?;
        Ok(())
    })
}
