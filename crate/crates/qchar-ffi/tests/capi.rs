//! Drive the C ABI the way a C caller would: through raw pointers,
//! checking statuses, and releasing every resource.

use std::ffi::{CStr, CString};
use std::ptr;

use qchar_ffi::{
    qchar_last_error, qchar_series_coefficient, qchar_series_free, qchar_series_new,
    qchar_series_term_count, qchar_series_to_json, qchar_string_free, qchar_verify_decomposition,
    qchar_version, QcharSeriesHandle, QcharStatus,
};

fn c(text: &str) -> CString {
    CString::new(text).expect("no interior NUL")
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(qchar_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn finite_standard_series_round_trip() {
    let expr = c("Y[-1]*Y[-3]");
    let mut handle: *mut QcharSeriesHandle = ptr::null_mut();
    let status = unsafe { qchar_series_new(expr.as_ptr(), -16, 0, 6, &mut handle) };
    assert_eq!(status, QcharStatus::Ok);
    assert!(!handle.is_null());

    let mut count: usize = 0;
    assert_eq!(
        unsafe { qchar_series_term_count(handle, &mut count) },
        QcharStatus::Ok
    );
    assert_eq!(count, 4);

    for (monomial, want) in [
        ("1", 1),
        ("A[0]^-1", 1),
        ("A[-2]^-1", 1),
        ("A[0]^-1*A[-2]^-1", 1),
    ] {
        let m = c(monomial);
        let mut coeff: i64 = 0;
        assert_eq!(
            unsafe { qchar_series_coefficient(handle, m.as_ptr(), &mut coeff) },
            QcharStatus::Ok,
            "coefficient of {monomial}"
        );
        assert_eq!(coeff, want, "coefficient of {monomial}");
    }

    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        unsafe { qchar_series_to_json(handle, &mut json) },
        QcharStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { qchar_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    assert_eq!(v["terms"][0]["monomial"], "1");
    assert_eq!(v["terms"][0]["coeff"], 1);

    unsafe { qchar_series_free(handle) };
}

#[test]
fn limit_series_honors_the_region() {
    let expr = c("Psi[0]^-1");
    let mut handle: *mut QcharSeriesHandle = ptr::null_mut();
    let status = unsafe { qchar_series_new(expr.as_ptr(), -4, 0, 2, &mut handle) };
    assert_eq!(status, QcharStatus::Ok);
    // Indices 0, -2, -4 with at most two of them: 1 + 3 + 3 monomials.
    let mut count: usize = 0;
    assert_eq!(
        unsafe { qchar_series_term_count(handle, &mut count) },
        QcharStatus::Ok
    );
    assert_eq!(count, 7);
    unsafe { qchar_series_free(handle) };
}

#[test]
fn statuses_classify_failures() {
    let mut handle: *mut QcharSeriesHandle = ptr::null_mut();

    // Null arguments.
    assert_eq!(
        unsafe { qchar_series_new(ptr::null(), -4, 0, 2, &mut handle) },
        QcharStatus::NullArgument
    );
    let expr = c("Psi[0]^-1");
    assert_eq!(
        unsafe { qchar_series_new(expr.as_ptr(), -4, 0, 2, ptr::null_mut()) },
        QcharStatus::NullArgument
    );

    // Unparseable and non-negative inputs.
    let bad = c("Q[0]");
    assert_eq!(
        unsafe { qchar_series_new(bad.as_ptr(), -4, 0, 2, &mut handle) },
        QcharStatus::InvalidInput
    );
    let msg = unsafe { CStr::from_ptr(qchar_last_error()) }.to_str().unwrap();
    assert!(msg.contains("byte"), "message: {msg}");

    let positive = c("Psi[0]^1");
    assert_eq!(
        unsafe { qchar_series_new(positive.as_ptr(), -4, 0, 2, &mut handle) },
        QcharStatus::InvalidInput
    );
    let msg = unsafe { CStr::from_ptr(qchar_last_error()) }.to_str().unwrap();
    assert!(msg.contains("negative"), "message: {msg}");

    // A coefficient outside the tracked region is an error, not a zero.
    let expr = c("Psi[0]^-1");
    assert_eq!(
        unsafe { qchar_series_new(expr.as_ptr(), -4, 0, 2, &mut handle) },
        QcharStatus::Ok
    );
    let outside = c("A[-100]^-1");
    let mut coeff: i64 = 0;
    assert_eq!(
        unsafe { qchar_series_coefficient(handle, outside.as_ptr(), &mut coeff) },
        QcharStatus::ComputeFailed
    );
    unsafe { qchar_series_free(handle) };

    // Freeing null pointers is a no-op.
    unsafe {
        qchar_series_free(ptr::null_mut());
        qchar_string_free(ptr::null_mut());
    }
}

#[test]
fn decomposition_verification_crosses_the_boundary() {
    let mut passed = false;
    assert_eq!(
        unsafe { qchar_verify_decomposition(-8, 0, 4, &mut passed) },
        QcharStatus::Ok
    );
    assert!(passed);

    // An invalid window is classified as invalid input.
    assert_eq!(
        unsafe { qchar_verify_decomposition(1, 0, 4, &mut passed) },
        QcharStatus::InvalidInput
    );
}
