//! C ABI for the exact q-character library.
//!
//! Conventions:
//!
//! * Every function returns a [`QcharStatus`]; results come back through
//!   `out` pointers that are written only on `Ok`.
//! * Series live behind opaque handles created by [`qchar_series_new`]
//!   and released by [`qchar_series_free`]. Strings returned through
//!   `out` pointers are released by [`qchar_string_free`].
//! * No call unwinds across the boundary: panics are caught and turned
//!   into [`QcharStatus::Panicked`].
//! * On failure, [`qchar_last_error`] returns a thread-local message
//!   describing the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe, UnwindSafe};

use qchar::closedforms::{chi_infinity, standard_qchar, verify_decomposition};
use qchar::parse::{parse_a_monomial, parse_lweight_expr};
use qchar::qseries::{QCharSeries, Region};

/// Outcome of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcharStatus {
    /// The call succeeded and every `out` pointer was written.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument failed to parse or violated a documented contract.
    InvalidInput = 2,
    /// The computation itself failed (overflow, truncation, budget, ...).
    ComputeFailed = 3,
    /// A panic was caught at the boundary; state is unchanged.
    Panicked = 4,
}

/// Opaque owner of one exact character series.
pub struct QcharSeriesHandle {
    inner: QCharSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("empty message"));
}

fn remember_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("sanitized message");
    });
}

fn status_for(e: &qchar::Error) -> QcharStatus {
    remember_error(&e.to_string());
    if e.is_invalid_input() {
        QcharStatus::InvalidInput
    } else {
        QcharStatus::ComputeFailed
    }
}

/// Run a fallible body without letting a panic cross the ABI.
fn guarded(body: impl FnOnce() -> QcharStatus + UnwindSafe) -> QcharStatus {
    match catch_unwind(body) {
        Ok(status) => status,
        Err(_) => {
            remember_error("panic caught at the C boundary");
            QcharStatus::Panicked
        }
    }
}

/// # Safety
/// `ptr` must be either null or a valid NUL-terminated C string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, QcharStatus> {
    if ptr.is_null() {
        remember_error("null string argument");
        return Err(QcharStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        remember_error("string argument is not valid UTF-8");
        QcharStatus::InvalidInput
    })
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn qchar_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Most recent error message raised on the calling thread, as a
/// NUL-terminated string. The pointer stays valid until the next failing
/// call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn qchar_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Build the normalized q-character of the l-weight written in `expr`
/// (for example `"Y[-1]*Y[-3]"` or `"Psi[0]^-1"`), tracked on the region
/// `[rmin, rmax]` with total degree at most `degcap`.
///
/// Products of positive `Y` powers give the finite standard character
/// exactly; any other negative l-weight gives the limit character
/// truncated to the region. On `Ok`, `*out` owns the series and must be
/// released with [`qchar_series_free`].
///
/// # Safety
/// `expr` must be a valid NUL-terminated C string and `out` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qchar_series_new(
    expr: *const c_char,
    rmin: i64,
    rmax: i64,
    degcap: u32,
    out: *mut *mut QcharSeriesHandle,
) -> QcharStatus {
    if out.is_null() {
        remember_error("null out pointer");
        return QcharStatus::NullArgument;
    }
    let text = match read_str(expr) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(AssertUnwindSafe(|| {
        let parsed = match parse_lweight_expr(text) {
            Ok(p) => p,
            Err(e) => return status_for(&e),
        };
        let built = match parsed.ystring {
            Some(ys) => standard_qchar(&ys),
            None => {
                Region::new(rmin, rmax, degcap).and_then(|r| chi_infinity(&parsed.lweight, r))
            }
        };
        match built {
            Ok(series) => {
                *out = Box::into_raw(Box::new(QcharSeriesHandle { inner: series }));
                QcharStatus::Ok
            }
            Err(e) => status_for(&e),
        }
    }))
}

/// Number of tracked monomials in the series.
///
/// # Safety
/// `series` must be a live handle from this library and `out` a valid
/// pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qchar_series_term_count(
    series: *const QcharSeriesHandle,
    out: *mut usize,
) -> QcharStatus {
    if series.is_null() || out.is_null() {
        remember_error("null argument");
        return QcharStatus::NullArgument;
    }
    guarded(AssertUnwindSafe(|| {
        *out = (*series).inner.num_terms();
        QcharStatus::Ok
    }))
}

/// Exact integer coefficient of one inverse-A monomial, written as in
/// `"A[0]^-1*A[-2]^-1"` (or `"1"` for the constant term). Asking for a
/// monomial outside the tracked region is an error, not a zero.
///
/// # Safety
/// `series` must be a live handle, `monomial` a valid NUL-terminated C
/// string, and `out` a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qchar_series_coefficient(
    series: *const QcharSeriesHandle,
    monomial: *const c_char,
    out: *mut i64,
) -> QcharStatus {
    if series.is_null() || out.is_null() {
        remember_error("null argument");
        return QcharStatus::NullArgument;
    }
    let text = match read_str(monomial) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(AssertUnwindSafe(|| {
        let m = match parse_a_monomial(text) {
            Ok(m) => m,
            Err(e) => return status_for(&e),
        };
        match (*series).inner.coefficient_a(&m) {
            Ok(c) => {
                *out = c;
                QcharStatus::Ok
            }
            Err(e) => status_for(&e),
        }
    }))
}

/// Render the series as a JSON object with its window and a sorted term
/// list. On `Ok`, `*out` owns the string and must be released with
/// [`qchar_string_free`].
///
/// # Safety
/// `series` must be a live handle and `out` a valid pointer to writable
/// memory.
#[no_mangle]
pub unsafe extern "C" fn qchar_series_to_json(
    series: *const QcharSeriesHandle,
    out: *mut *mut c_char,
) -> QcharStatus {
    if series.is_null() || out.is_null() {
        remember_error("null argument");
        return QcharStatus::NullArgument;
    }
    guarded(AssertUnwindSafe(|| {
        let rendered = match serde_json::to_string(&(*series).inner) {
            Ok(s) => s,
            Err(e) => {
                remember_error(&e.to_string());
                return QcharStatus::ComputeFailed;
            }
        };
        match CString::new(rendered) {
            Ok(c) => {
                *out = c.into_raw();
                QcharStatus::Ok
            }
            Err(_) => {
                remember_error("rendered JSON contained a NUL byte");
                QcharStatus::ComputeFailed
            }
        }
    }))
}

/// Verify, coefficient-exactly on `[rmin, rmax]` with degree cap
/// `degcap`, that the limit character decomposes as a multiplicity-free
/// sum of simple characters. Writes `true` into `out_passed` only if
/// both the equality and multiplicity-freeness hold.
///
/// # Safety
/// `out_passed` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn qchar_verify_decomposition(
    rmin: i64,
    rmax: i64,
    degcap: u32,
    out_passed: *mut bool,
) -> QcharStatus {
    if out_passed.is_null() {
        remember_error("null out pointer");
        return QcharStatus::NullArgument;
    }
    guarded(AssertUnwindSafe(|| {
        let report = match Region::new(rmin, rmax, degcap).and_then(verify_decomposition) {
            Ok(r) => r,
            Err(e) => return status_for(&e),
        };
        *out_passed = report.equal && report.multiplicity_free;
        QcharStatus::Ok
    }))
}

/// Release a series handle. Null is ignored. The handle must not be used
/// afterwards.
///
/// # Safety
/// `series` must be null or a handle produced by this library that has
/// not been freed before.
#[no_mangle]
pub unsafe extern "C" fn qchar_series_free(series: *mut QcharSeriesHandle) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Release a string produced by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string produced by this library that has not
/// been freed before.
#[no_mangle]
pub unsafe extern "C" fn qchar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
