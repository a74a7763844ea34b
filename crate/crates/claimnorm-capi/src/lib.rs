//! C ABI over the scoring primitives so other languages can bind: the METEOR
//! scorer behind an opaque handle, the Porter stemmer, claim post-processing
//! and the truncation baseline. All functions return status codes; strings
//! returned through out-parameters are freed with `claimnorm_string_free`.
//!
//! The header `include/claimnorm.h` is generated at build time by cbindgen.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use claimnorm::meteor::{meteor_single, MeteorParams};
use claimnorm::pipelines::{postprocess_claim, truncate_text};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimnormStatus {
    ClaimnormOk = 0,
    ClaimnormNullPointer = 1,
    ClaimnormInvalidUtf8 = 2,
    ClaimnormInvalidArgument = 3,
}

/// Per-pair METEOR components.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ClaimnormMeteorBreakdown {
    pub matches: usize,
    pub chunks: usize,
    pub precision: f64,
    pub recall: f64,
    pub fmean: f64,
    pub penalty: f64,
    pub score: f64,
}

/// Opaque METEOR scorer handle.
pub struct ClaimnormMeteor {
    params: MeteorParams,
}

/// Scorer with default parameters (alpha 0.9, beta 3, gamma 0.5, exact and
/// stem stages). Free with `claimnorm_meteor_free`.
#[no_mangle]
pub extern "C" fn claimnorm_meteor_new() -> *mut ClaimnormMeteor {
    Box::into_raw(Box::new(ClaimnormMeteor {
        params: MeteorParams::default(),
    }))
}

/// Scorer with explicit parameters. Returns NULL when alpha is outside
/// (0, 1), beta is not positive, or gamma is outside [0, 1].
#[no_mangle]
pub extern "C" fn claimnorm_meteor_new_with(
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> *mut ClaimnormMeteor {
    let alpha_ok = alpha > 0.0 && alpha < 1.0;
    if !alpha_ok || beta <= 0.0 || !(0.0..=1.0).contains(&gamma) {
        return ptr::null_mut();
    }
    let params = MeteorParams {
        alpha,
        beta,
        gamma,
        ..MeteorParams::default()
    };
    Box::into_raw(Box::new(ClaimnormMeteor { params }))
}

/// # Safety
/// `scorer` must be a pointer returned by one of the constructors above and
/// not yet freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_meteor_free(scorer: *mut ClaimnormMeteor) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, ClaimnormStatus> {
    if ptr.is_null() {
        return Err(ClaimnormStatus::ClaimnormNullPointer);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| ClaimnormStatus::ClaimnormInvalidUtf8)
}

fn string_out(value: String, out: *mut *mut c_char) -> ClaimnormStatus {
    // interior NULs cannot come from our own processing of NUL-free input
    let c = CString::new(value).expect("no interior NULs");
    unsafe { *out = c.into_raw() };
    ClaimnormStatus::ClaimnormOk
}

/// Score one hypothesis against one reference, writing the breakdown to
/// `out`.
///
/// # Safety
/// `scorer` must be a live scorer handle; `hypothesis` and `reference` must
/// be NUL-terminated strings; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_meteor_score(
    scorer: *const ClaimnormMeteor,
    hypothesis: *const c_char,
    reference: *const c_char,
    out: *mut ClaimnormMeteorBreakdown,
) -> ClaimnormStatus {
    if scorer.is_null() || out.is_null() {
        return ClaimnormStatus::ClaimnormNullPointer;
    }
    let hypothesis = match cstr_arg(hypothesis) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let reference = match cstr_arg(reference) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let b = meteor_single(hypothesis, reference, &(*scorer).params);
    *out = ClaimnormMeteorBreakdown {
        matches: b.matches,
        chunks: b.chunks,
        precision: b.precision,
        recall: b.recall,
        fmean: b.fmean,
        penalty: b.penalty,
        score: b.score,
    };
    ClaimnormStatus::ClaimnormOk
}

/// Porter-stem one lowercase word into `out`.
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` must be writable. The
/// result is freed with `claimnorm_string_free`.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_porter_stem(
    word: *const c_char,
    out: *mut *mut c_char,
) -> ClaimnormStatus {
    if out.is_null() {
        return ClaimnormStatus::ClaimnormNullPointer;
    }
    match cstr_arg(word) {
        Ok(word) => string_out(claimnorm::meteor::porter_stem(word), out),
        Err(status) => status,
    }
}

/// Clean a raw model response into a claim string (label stripping, marker
/// cut, whitespace collapse).
///
/// # Safety
/// As for `claimnorm_porter_stem`.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_postprocess_claim(
    raw: *const c_char,
    out: *mut *mut c_char,
) -> ClaimnormStatus {
    if out.is_null() {
        return ClaimnormStatus::ClaimnormNullPointer;
    }
    match cstr_arg(raw) {
        Ok(raw) => string_out(postprocess_claim(raw), out),
        Err(status) => status,
    }
}

/// Truncate text at `limit` Unicode scalar values, dropping any trailing
/// partial word (the regurgitation baseline transform).
///
/// # Safety
/// As for `claimnorm_porter_stem`.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_truncate_baseline(
    text: *const c_char,
    limit: usize,
    out: *mut *mut c_char,
) -> ClaimnormStatus {
    if out.is_null() {
        return ClaimnormStatus::ClaimnormNullPointer;
    }
    if limit == 0 {
        return ClaimnormStatus::ClaimnormInvalidArgument;
    }
    match cstr_arg(text) {
        Ok(text) => string_out(truncate_text(text, limit), out),
        Err(status) => status,
    }
}

/// # Safety
/// `s` must be a string returned by this library and not yet freed; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn claimnorm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn claimnorm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
