use std::ffi::{CStr, CString};
use std::ptr;

use regpolar_ffi::*;

/// Interleaved data of a 1-block operator over `ℂ` from real entries.
fn real_data(rows: &[&[f64]]) -> Vec<f64> {
    rows.iter()
        .flat_map(|r| r.iter().flat_map(|&x| [x, 0.0]))
        .collect()
}

fn make(profile: &[usize], k: usize, m: usize, data: &[f64]) -> *mut RpOperator {
    let mut out = ptr::null_mut();
    let status = unsafe {
        rp_operator_new(
            profile.as_ptr(),
            profile.len(),
            k,
            m,
            data.as_ptr(),
            data.len(),
            &mut out,
        )
    };
    assert_eq!(status, RpStatus::Ok);
    out
}

fn data(op: *const RpOperator) -> Vec<f64> {
    let n = unsafe { rp_operator_data_len(op) };
    let mut buf = vec![0.0; n];
    assert_eq!(
        unsafe { rp_operator_copy_data(op, buf.as_mut_ptr(), n) },
        RpStatus::Ok
    );
    buf
}

fn last_error() -> String {
    let p = rp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn nilpotent_polar_through_handles() {
    let t = make(&[1], 2, 2, &real_data(&[&[0.0, 0.0], &[1.0, 0.0]]));
    let (mut v, mut abs) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(
        unsafe { rp_polar(t, ptr::null(), &mut v, &mut abs) },
        RpStatus::Ok
    );
    assert_eq!(data(v), real_data(&[&[0.0, 0.0], &[1.0, 0.0]]));
    assert_eq!(data(abs), real_data(&[&[0.0, 0.0], &[0.0, 1.0]]));

    let mut verdicts = RpVerdicts {
        polar_exists: false,
        complemented: false,
        inverse_exists: false,
        max_residual: f64::NAN,
    };
    assert_eq!(
        unsafe { rp_verify(t, ptr::null(), &mut verdicts) },
        RpStatus::Ok
    );
    assert!(verdicts.polar_exists && verdicts.complemented && verdicts.inverse_exists);
    assert!(verdicts.max_residual <= 1e-8);
    unsafe {
        rp_operator_free(v);
        rp_operator_free(abs);
        rp_operator_free(t);
    }
}

#[test]
fn pinv_and_transform_round_trip() {
    let t = make(&[1], 2, 2, &real_data(&[&[3.0, 0.0], &[0.0, 4.0]]));
    let tol = rp_tolerances_default();
    assert_eq!(tol.identity, 1e-8);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rp_pinv(t, &tol, &mut s) }, RpStatus::Ok);
    let sd = data(s);
    assert!((sd[0] - 1.0 / 3.0).abs() < 1e-14 && (sd[6] - 0.25).abs() < 1e-14);

    let (mut f, mut back) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { rp_btransform(t, &tol, &mut f) }, RpStatus::Ok);
    assert!(unsafe { rp_operator_norm(f) } < 1.0);
    // x / sqrt(1 + x^2) on the diagonal
    let fd = data(f);
    assert!((fd[0] - 3.0 / 10f64.sqrt()).abs() < 1e-14);
    assert!((fd[6] - 4.0 / 17f64.sqrt()).abs() < 1e-14);
    assert_eq!(
        unsafe { rp_inverse_btransform(f, &tol, &mut back) },
        RpStatus::Ok
    );
    for (a, b) in data(back).iter().zip(data(t)) {
        assert!((a - b).abs() < 1e-12);
    }
    unsafe {
        for h in [t, s, f, back] {
            rp_operator_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    let mut out = ptr::null_mut();
    let status =
        unsafe { rp_operator_new([1usize].as_ptr(), 1, 2, 2, [1.0, 0.0].as_ptr(), 2, &mut out) };
    assert_eq!(status, RpStatus::ShapeMismatch);
    assert!(out.is_null());
    assert!(last_error().contains("expected 8 doubles"));

    let status = unsafe { rp_operator_new([0usize].as_ptr(), 1, 1, 1, ptr::null(), 0, &mut out) };
    assert_eq!(status, RpStatus::InvalidArgument);

    let mut v = ptr::null_mut();
    let mut abs = ptr::null_mut();
    assert_eq!(
        unsafe { rp_polar(ptr::null(), ptr::null(), &mut v, &mut abs) },
        RpStatus::NullArgument
    );

    // an isometry is not a valid transform: 1 - F*F is singular
    let f = make(&[1], 1, 1, &[1.0, 0.0]);
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { rp_inverse_btransform(f, ptr::null(), &mut t) },
        RpStatus::Computation
    );
    assert!(t.is_null());

    let bad = RpTolerances {
        identity: -1.0,
        rank: 1e-10,
    };
    assert_eq!(
        unsafe { rp_btransform(f, &bad, &mut t) },
        RpStatus::InvalidArgument
    );
    unsafe { rp_operator_free(f) };
    unsafe { rp_operator_free(ptr::null_mut()) };
}

#[test]
fn json_entry_point_matches_the_command_line() {
    let problem = CString::new(
        r#"{"backend": "function", "domain": [["0", "1"]], "rank": 1,
            "operator": {"entries": [{"pieces": [{"lo": "0", "hi": "1", "num": ["0", "1"]}]}]}}"#,
    )
    .unwrap();
    let cmd = CString::new("verify-thm31").unwrap();
    let mut out = ptr::null_mut();
    let code = unsafe { rp_run_json(cmd.as_ptr(), problem.as_ptr(), 0.0, &mut out) };
    assert_eq!(code, 0);
    let report = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { rp_string_free(out) };
    assert!(report.contains("\"cond_i\": false"), "{report}");
    assert!(report.contains("\"point\": \"0\""));

    let cmd = CString::new("btransform").unwrap();
    let code = unsafe { rp_run_json(cmd.as_ptr(), problem.as_ptr(), 0.0, &mut out) };
    assert_eq!(code, 2);
    unsafe { rp_string_free(out) };

    let cmd = CString::new("no-such-command").unwrap();
    assert_eq!(
        unsafe { rp_run_json(cmd.as_ptr(), problem.as_ptr(), 0.0, &mut out) },
        2
    );
    unsafe { rp_string_free(out) };
    assert_eq!(
        unsafe { rp_run_json(ptr::null(), problem.as_ptr(), 0.0, &mut out) },
        -1
    );
}
