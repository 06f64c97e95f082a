use std::ffi::{CStr, CString};
use std::ptr;

use cohlab_ffi::*;

fn last_error() -> String {
    let p = coh_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn pure_state_monotones() {
    let re = [0.5; 4];
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(
            coh_state_from_amplitudes(re.as_ptr(), ptr::null(), 4, &mut state),
            CohStatus::Ok
        );
        let mut dim = 0;
        assert_eq!(coh_state_dim(state, &mut dim), CohStatus::Ok);
        assert_eq!(dim, 4);
        let mut m = CohMonotones::default();
        assert_eq!(coh_monotones(state, 1, &mut m), CohStatus::Ok);
        assert_eq!(m.coherence_number, 4);
        assert_eq!(m.coherence_number_exact, 1);
        assert!((m.cc - 3.0).abs() < 1e-12 && (m.ccn - 1.0).abs() < 1e-12);
        assert!((m.l1 - 3.0).abs() < 1e-12 && (m.rel_entropy - 2.0).abs() < 1e-12);
        assert_eq!(m.roof_estimates, 0);
        let mut c2 = 0.0;
        assert_eq!(coh_k_concurrence(state, 2, &mut c2), CohStatus::Ok);
        assert!(c2.abs() < 1e-12);
        let mut json = ptr::null_mut();
        assert_eq!(coh_monotones_json(state, 1, &mut json), CohStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        coh_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["coherence_number"], 4);
        coh_state_free(state);
    }
}

#[test]
fn density_and_json_states() {
    let third = 1.0 / 3.0;
    let re = [third, 0.0, 0.0, 0.0, third, 0.0, 0.0, 0.0, third];
    let mut state = ptr::null_mut();
    unsafe {
        assert_eq!(
            coh_state_from_density(re.as_ptr(), ptr::null(), 3, &mut state),
            CohStatus::Ok
        );
        let mut m = CohMonotones::default();
        assert_eq!(coh_monotones(state, 0, &mut m), CohStatus::Ok);
        assert_eq!(m.coherence_number, 1);
        assert_eq!(m.roof_estimates, 1);
        assert!(m.cc.abs() < 1e-9 && m.l1.abs() < 1e-12);
        coh_state_free(state);

        let json = CString::new(r#"{"dim":2,"amplitudes":[[0.6,0],[0,0.8]]}"#).unwrap();
        let mut s2 = ptr::null_mut();
        assert_eq!(coh_state_from_json(json.as_ptr(), &mut s2), CohStatus::Ok);
        assert_eq!(coh_monotones(s2, 0, &mut m), CohStatus::Ok);
        assert!((m.cc - 0.96).abs() < 1e-12);
        coh_state_free(s2);
    }
}

#[test]
fn errors_are_reported() {
    let mut state = ptr::null_mut();
    unsafe {
        let zeros = [0.0; 3];
        assert_eq!(
            coh_state_from_amplitudes(zeros.as_ptr(), ptr::null(), 3, &mut state),
            CohStatus::Validation
        );
        assert!(state.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            coh_state_from_amplitudes(ptr::null(), ptr::null(), 3, &mut state),
            CohStatus::NullPointer
        );
        assert!(last_error().contains("null"));
        let bad = CString::new("{not json").unwrap();
        assert_eq!(
            coh_state_from_json(bad.as_ptr(), &mut state),
            CohStatus::Json
        );
        let mut x = 0.0;
        assert_eq!(coh_specht_ratio(0.0, &mut x), CohStatus::InvalidArgument);
        assert_eq!(
            coh_specht_ratio(0.5, ptr::null_mut()),
            CohStatus::NullPointer
        );
        let (mut e, mut a) = (0.0, 0.0);
        assert_eq!(
            coh_grover_cost_performance(1024, 5, 0.001, &mut e, &mut a),
            CohStatus::Domain
        );
        let mut p = CohGroverPoint::default();
        assert_eq!(
            coh_grover_point(4, 4, 0.0, &mut p),
            CohStatus::InvalidArgument
        );
        assert_eq!(
            coh_grover_point(4, 1, -1.0, &mut p),
            CohStatus::InvalidArgument
        );
        assert_eq!(coh_specht_ratio(0.5, &mut x), CohStatus::Ok);
        assert!(coh_last_error_message().is_null());
        coh_state_free(ptr::null_mut());
        coh_trajectory_free(ptr::null_mut());
        coh_string_free(ptr::null_mut());
    }
}

#[test]
fn grover_quantities() {
    unsafe {
        let mut p = CohGroverPoint::default();
        assert_eq!(coh_grover_point(4, 1, 1.0, &mut p), CohStatus::Ok);
        assert!((p.success_probability - 1.0).abs() < 1e-12 && p.ccn < 1e-12);
        assert_eq!(coh_grover_point(1024, 5, 0.0, &mut p), CohStatus::Ok);
        assert_eq!(p.ccn, 1.0);
        assert_eq!(p.success_probability, 5.0 / 1024.0);
        let (mut r, mut hit) = (0.0, 0);
        assert_eq!(coh_grover_critical(4, 1, &mut r, &mut hit), CohStatus::Ok);
        assert!((r - 1.0).abs() < 1e-12 && hit == 1);
        let (mut e, mut a) = (0.0, 0.0);
        assert_eq!(
            coh_grover_cost_performance(1024, 5, 1.0, &mut e, &mut a),
            CohStatus::Ok
        );
        assert_eq!(e, 0.0);
        let mut s = 0.0;
        assert_eq!(coh_specht_ratio(1.0, &mut s), CohStatus::Ok);
        assert_eq!(s, 1.0);
    }
}

#[test]
fn trajectory_handle() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(coh_grover_trajectory(1024, 5, 10, &mut t), CohStatus::Ok);
        let mut len = 0;
        assert_eq!(coh_trajectory_len(t, &mut len), CohStatus::Ok);
        assert_eq!(len, 11);
        let mut pt = CohTrajectoryPoint::default();
        assert_eq!(coh_trajectory_point(t, 0, &mut pt), CohStatus::Ok);
        assert_eq!(pt.ccn, 1.0);
        assert_eq!(pt.has_w, 0);
        assert_eq!(coh_trajectory_point(t, 10, &mut pt), CohStatus::Ok);
        assert!(pt.success_probability > 0.98 && pt.has_w == 1 && pt.w > 0.0);
        assert_eq!(
            coh_trajectory_point(t, 11, &mut pt),
            CohStatus::InvalidArgument
        );
        let mut csv = ptr::null_mut();
        assert_eq!(coh_trajectory_csv(t, &mut csv), CohStatus::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        coh_string_free(csv);
        assert!(text.starts_with("r,alpha_r,P,coherence_number,ccN,l1,rel_entropy,w\n"));
        assert_eq!(text.lines().count(), 12);
        coh_trajectory_free(t);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(coh_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
