//! C ABI for the qlab library.
//!
//! Conventions:
//! - Series are exposed as opaque `QlabSeries` handles; free with
//!   [`qlab_series_free`].
//! - Fallible functions return a `QlabStatus` code; on any non-OK code the
//!   message is retrievable with [`qlab_last_error`] (thread-local).
//! - Strings returned by this library are NUL-terminated, UTF-8, and must be
//!   released with [`qlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qlab::bipartitions::{bipartition_oracle, bipartition_series, BipartitionParams};
use qlab::congruences::{family_by_id, verify_family};
use qlab::number_theory::legendre;
use qlab::series::{QSeries, Ring};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QlabStatus {
    Ok = 0,
    InvalidArgument = 1,
    ComputationFailed = 2,
    VerificationFailed = 3,
    Panic = 4,
}

/// Opaque series handle. The layout is private to this library.
pub struct QlabSeries(QSeries);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard<F: FnOnce() -> QlabStatus>(f: F) -> QlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            QlabStatus::Panic
        }
    }
}

fn ring_of(modulus: u64) -> Result<Ring, qlab::QlabError> {
    if modulus == 0 {
        Ok(Ring::Integers)
    } else {
        Ring::mod_m(modulus)
    }
}

/// Returns the message for the most recent error on this thread, or NULL if
/// the last call succeeded. The pointer is valid until the next qlab call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn qlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Builds `(q^delta; q^delta)_inf` truncated at `trunc`. `modulus` 0 means
/// exact integers; otherwise coefficients live in Z/modulus.
#[no_mangle]
pub extern "C" fn qlab_series_euler_product(
    delta: u64,
    modulus: u64,
    trunc: u64,
    out: *mut *mut QlabSeries,
) -> QlabStatus {
    guard(|| {
        if out.is_null() || delta == 0 {
            set_error("out must be non-NULL and delta positive");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        let ring = match ring_of(modulus) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return QlabStatus::InvalidArgument;
            }
        };
        match QSeries::euler_product(delta, ring, trunc as usize) {
            Ok(series) => {
                unsafe { *out = Box::into_raw(Box::new(QlabSeries(series))) };
                QlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QlabStatus::ComputationFailed
            }
        }
    })
}

/// Builds the (u,v)-regular bipartition counting series truncated at `trunc`.
#[no_mangle]
pub extern "C" fn qlab_bipartition_series_new(
    u: u64,
    v: u64,
    modulus: u64,
    trunc: u64,
    out: *mut *mut QlabSeries,
) -> QlabStatus {
    guard(|| {
        if out.is_null() {
            set_error("out must be non-NULL");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        let built = BipartitionParams::new(u, v)
            .and_then(|params| {
                let ring = ring_of(modulus)?;
                bipartition_series(params, ring, trunc as usize)
            });
        match built {
            Ok(series) => {
                unsafe { *out = Box::into_raw(Box::new(QlabSeries(series))) };
                QlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QlabStatus::InvalidArgument
            }
        }
    })
}

/// Reads coefficient `n` (the value for negative `n` is 0 by convention).
#[no_mangle]
pub extern "C" fn qlab_series_coeff(
    series: *const QlabSeries,
    n: i64,
    out: *mut i64,
) -> QlabStatus {
    guard(|| {
        if series.is_null() || out.is_null() {
            set_error("series and out must be non-NULL");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        match unsafe { &(*series).0 }.coeff(n) {
            Ok(c) => {
                unsafe { *out = c };
                QlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QlabStatus::InvalidArgument
            }
        }
    })
}

/// Truncation order of the handle (coefficients 0..=trunc are stored).
#[no_mangle]
pub extern "C" fn qlab_series_trunc(series: *const QlabSeries) -> u64 {
    if series.is_null() {
        return 0;
    }
    unsafe { &(*series).0 }.trunc() as u64
}

/// Releases a series handle. NULL is accepted and ignored.
#[no_mangle]
pub extern "C" fn qlab_series_free(series: *mut QlabSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Counts (u,v)-regular bipartitions of `n` by direct enumeration.
#[no_mangle]
pub extern "C" fn qlab_bipartition_oracle(
    u: u64,
    v: u64,
    n: u64,
    out: *mut u64,
) -> QlabStatus {
    guard(|| {
        if out.is_null() {
            set_error("out must be non-NULL");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        match BipartitionParams::new(u, v).and_then(|params| bipartition_oracle(params, n)) {
            Ok(count) => {
                unsafe { *out = count };
                QlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QlabStatus::InvalidArgument
            }
        }
    })
}

/// Legendre symbol (a/p) for an odd prime p: returns -1, 0, or 1 via `out`.
#[no_mangle]
pub extern "C" fn qlab_legendre(a: i64, p: u64, out: *mut i64) -> QlabStatus {
    guard(|| {
        if out.is_null() {
            set_error("out must be non-NULL");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        match legendre(a, p) {
            Ok(s) => {
                unsafe { *out = s };
                QlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                QlabStatus::InvalidArgument
            }
        }
    })
}

/// Runs the named congruence family and writes a JSON report array to
/// `*out_json` (free with `qlab_string_free`). `n_max` 0 keeps each
/// instance's default bound. Returns `VerificationFailed` if any instance
/// FAILs; the JSON is still written in that case.
#[no_mangle]
pub extern "C" fn qlab_verify_family_json(
    family_id: *const c_char,
    n_max: u64,
    out_json: *mut *mut c_char,
) -> QlabStatus {
    guard(|| {
        if family_id.is_null() || out_json.is_null() {
            set_error("family_id and out_json must be non-NULL");
            return QlabStatus::InvalidArgument;
        }
        clear_error();
        let id = match unsafe { CStr::from_ptr(family_id) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("family_id is not valid UTF-8");
                return QlabStatus::InvalidArgument;
            }
        };
        let family = match family_by_id(id) {
            Ok(f) => f,
            Err(e) => {
                set_error(e.to_string());
                return QlabStatus::InvalidArgument;
            }
        };
        let override_bound = if n_max == 0 { None } else { Some(n_max) };
        let reports = match verify_family(&family, override_bound) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return QlabStatus::ComputationFailed;
            }
        };
        let json = match serde_json::to_string(&reports) {
            Ok(j) => j,
            Err(e) => {
                set_error(e.to_string());
                return QlabStatus::ComputationFailed;
            }
        };
        let c = match CString::new(json) {
            Ok(c) => c,
            Err(_) => {
                set_error("report JSON contained an interior NUL");
                return QlabStatus::ComputationFailed;
            }
        };
        unsafe { *out_json = c.into_raw() };
        if reports.iter().any(|r| r.is_blocking_failure()) {
            set_error("at least one instance FAILed; see the JSON report");
            QlabStatus::VerificationFailed
        } else {
            QlabStatus::Ok
        }
    })
}

/// Releases a string returned by this library. NULL is accepted and ignored.
#[no_mangle]
pub extern "C" fn qlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
