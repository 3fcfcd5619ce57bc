//! C ABI over `apsign`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every fallible call returns an [`ApStatus`]; on
//! failure a message is kept per thread and read with [`ap_last_error`].
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apsign::pattern::{b_matrix, positive_part, RealMatrix, SignPattern};
use apsign::realizer::{hypothesis_holds, Realization, RealizeError};
use apsign::structure::{
    digraph_of, irreducible_components, is_ap_irreducible, is_minimally_ap_irreducible, is_strongly_connected,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    /// The pattern does not meet the realizer's hypothesis.
    HypothesisFails = 4,
    /// The matrix has no certificate of algebraic positivity.
    NotCertified = 5,
    /// Internal invariant violation or numerical limit.
    EngineFailure = 6,
    BufferTooSmall = 7,
    InvalidArgument = 8,
    Panic = 9,
}

/// Opaque sign pattern.
pub struct ApPattern(SignPattern);

/// Opaque certified realization.
pub struct ApRealization(Realization);

/// Structural summary of a pattern.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ApCheckReport {
    pub order: usize,
    pub irreducible: bool,
    pub ap_irreducible: bool,
    pub minimally_ap_irreducible: bool,
    pub b_irreducible: bool,
    /// Number of irreducible components of A₊.
    pub components: usize,
    pub hypothesis: bool,
    /// −A meets the hypothesis (A itself may not).
    pub negation_hypothesis: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: ApStatus, msg: impl Into<String>) -> ApStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ApStatus) -> ApStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ApStatus::Panic, "internal panic"))
}

fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> ApStatus {
    if buf.is_null() {
        return fail(ApStatus::NullPointer, "output buffer is null");
    }
    if len < src.len() {
        return fail(
            ApStatus::BufferTooSmall,
            format!("need {} doubles, got {len}", src.len()),
        );
    }
    // SAFETY: caller promises `buf` points to at least `len` writable doubles.
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    ApStatus::Ok
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Free a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse pattern text (rows of `+ - 0`, `#` comments).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ap_pattern_parse(text: *const c_char, out: *mut *mut ApPattern) -> ApStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(ApStatus::NullPointer, "null argument");
        }
        let Ok(s) = unsafe { CStr::from_ptr(text) }.to_str() else {
            return fail(ApStatus::InvalidUtf8, "pattern text is not UTF-8");
        };
        match apsign::parse_pattern(s) {
            Ok(p) => {
                unsafe { *out = Box::into_raw(Box::new(ApPattern(p))) };
                ApStatus::Ok
            }
            Err(e) => fail(ApStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must come from [`ap_pattern_parse`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ap_pattern_free(p: *mut ApPattern) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Order of the pattern, 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ap_pattern_order(p: *const ApPattern) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.order())
}

/// Fill `out` with the structural report.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ap_pattern_check(p: *const ApPattern, out: *mut ApCheckReport) -> ApStatus {
    guard(|| {
        let (Some(p), false) = (unsafe { p.as_ref() }, out.is_null()) else {
            return fail(ApStatus::NullPointer, "null argument");
        };
        let a = &p.0;
        let ap = is_ap_irreducible(a);
        let report = ApCheckReport {
            order: a.order(),
            irreducible: is_strongly_connected(&digraph_of(a)),
            ap_irreducible: ap,
            minimally_ap_irreducible: ap && is_minimally_ap_irreducible(a),
            b_irreducible: is_strongly_connected(&digraph_of(&b_matrix(a))),
            components: irreducible_components(&positive_part(a)).len(),
            hypothesis: hypothesis_holds(a),
            negation_hypothesis: hypothesis_holds(&a.negate()),
        };
        unsafe { *out = report };
        ApStatus::Ok
    })
}

/// Build a certified matrix with the pattern's signs.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ap_realize(p: *const ApPattern, out: *mut *mut ApRealization) -> ApStatus {
    guard(|| {
        let (Some(p), false) = (unsafe { p.as_ref() }, out.is_null()) else {
            return fail(ApStatus::NullPointer, "null argument");
        };
        match apsign::realize(&p.0) {
            Ok(r) => {
                unsafe { *out = Box::into_raw(Box::new(ApRealization(r))) };
                ApStatus::Ok
            }
            Err(e @ RealizeError::HypothesisFails(_)) => fail(ApStatus::HypothesisFails, e.to_string()),
            Err(e) => fail(ApStatus::EngineFailure, e.to_string()),
        }
    })
}

/// # Safety
/// `r` must come from [`ap_realize`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_free(r: *mut ApRealization) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Order of the realized matrix, 0 for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_order(r: *const ApRealization) -> usize {
    unsafe { r.as_ref() }.map_or(0, |r| r.0.matrix.order())
}

/// The simple eigenvalue of the certificate, NaN for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_lambda(r: *const ApRealization) -> f64 {
    unsafe { r.as_ref() }.map_or(f64::NAN, |r| r.0.lambda)
}

/// Row-major matrix into `buf` (at least order² doubles).
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_matrix(r: *const ApRealization, buf: *mut f64, len: usize) -> ApStatus {
    guard(|| match unsafe { r.as_ref() } {
        Some(r) => copy_out(r.0.matrix.data(), buf, len),
        None => fail(ApStatus::NullPointer, "null handle"),
    })
}

/// Right (`which` = 0) or left (`which` = 1) eigenvector into `buf`.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_vector(
    r: *const ApRealization,
    which: u32,
    buf: *mut f64,
    len: usize,
) -> ApStatus {
    guard(|| {
        let Some(r) = (unsafe { r.as_ref() }) else {
            return fail(ApStatus::NullPointer, "null handle");
        };
        match which {
            0 => copy_out(&r.0.u, buf, len),
            1 => copy_out(&r.0.v, buf, len),
            _ => fail(
                ApStatus::InvalidArgument,
                format!("vector selector {which} is not 0 or 1"),
            ),
        }
    })
}

/// Witness coefficients, ascending powers, rounded to double. `*count` gets
/// the number of coefficients (degree + 1) even when `buf` is too small.
///
/// # Safety
/// `r` must be a live handle; `count` writable; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_witness(
    r: *const ApRealization,
    buf: *mut f64,
    len: usize,
    count: *mut usize,
) -> ApStatus {
    guard(|| {
        let (Some(r), false) = (unsafe { r.as_ref() }, count.is_null()) else {
            return fail(ApStatus::NullPointer, "null argument");
        };
        let f = &r.0.witness;
        let c: Vec<f64> = if f.low.len() == f.coefficients.len() {
            f.coefficients.iter().zip(&f.low).map(|(h, l)| h + l).collect()
        } else {
            f.coefficients.clone()
        };
        unsafe { *count = c.len() };
        copy_out(&c, buf, len)
    })
}

/// Full realization document as JSON; free with [`ap_string_free`]. Null on error.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ap_realization_json(r: *const ApRealization) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let Some(r) = (unsafe { r.as_ref() }) else {
            return fail(ApStatus::NullPointer, "null handle");
        };
        match serde_json::to_string(&r.0).map(CString::new) {
            Ok(Ok(s)) => {
                out = s.into_raw();
                ApStatus::Ok
            }
            _ => fail(ApStatus::EngineFailure, "serialization failed"),
        }
    });
    out
}

/// Search a row-major n×n matrix for a certificate. Returns `Ok` when one is
/// found (λ and, if non-null, u and v of length n are written),
/// `NotCertified` otherwise.
///
/// # Safety
/// `data` must hold n² doubles; `lambda` writable; `u`, `v` null or n doubles.
#[no_mangle]
pub unsafe extern "C" fn ap_verify(data: *const f64, n: usize, lambda: *mut f64, u: *mut f64, v: *mut f64) -> ApStatus {
    guard(|| {
        if data.is_null() || lambda.is_null() {
            return fail(ApStatus::NullPointer, "null argument");
        }
        let Some(len) = n.checked_mul(n).filter(|&l| l > 0) else {
            return fail(ApStatus::InvalidArgument, "order must be positive");
        };
        let entries = unsafe { std::slice::from_raw_parts(data, len) }.to_vec();
        let m = match RealMatrix::new(n, entries) {
            Ok(m) => m,
            Err(e) => return fail(ApStatus::InvalidArgument, e.to_string()),
        };
        let verdict = match apsign::verify_algebraic_positivity(&m) {
            Ok((v, _)) => v,
            Err(e) => return fail(ApStatus::EngineFailure, e.to_string()),
        };
        let (true, Some(l), Some(uu), Some(vv)) = (verdict.positive, verdict.lambda, verdict.u, verdict.v) else {
            let why = verdict.failure.map_or("no certificate".to_string(), |f| f.to_string());
            return fail(ApStatus::NotCertified, why);
        };
        unsafe { *lambda = l };
        for (src, dst) in [(&uu, u), (&vv, v)] {
            if !dst.is_null() {
                unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, n) };
            }
        }
        ApStatus::Ok
    })
}
