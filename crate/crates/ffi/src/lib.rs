//! C ABI over the dossier pipeline.  Handles are opaque, every call
//! returns a status code, strings are NUL-terminated copies owned by the
//! caller (release with stx_string_free), and panics are caught at the
//! boundary and reported as STX_ERR_PANIC instead of unwinding into C.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sextic_twist::error::Error;
use sextic_twist::orbits::TwistParams;
use sextic_twist::report::{assemble_dossier, dossier_json, Dossier, PipelineConfig};

/// Success.
pub const STX_OK: i32 = 0;
/// Invalid parameters or a null pointer.
pub const STX_ERR_INVALID: i32 = 2;
/// A configured cap was exceeded.
pub const STX_ERR_CAP: i32 = 3;
/// An internal identity failed; no result is produced.
pub const STX_ERR_IDENTITY: i32 = 4;
/// A panic was caught at the boundary.
pub const STX_ERR_PANIC: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn code_of(e: &Error) -> i32 {
    match e.exit_code() {
        3 => STX_ERR_CAP,
        4 => STX_ERR_IDENTITY,
        _ => STX_ERR_INVALID,
    }
}

/// Opaque dossier handle.
pub struct StxDossier {
    inner: Dossier,
}

fn guarded<F: FnOnce() -> i32>(body: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_error("panic caught at the C boundary".into());
            STX_ERR_PANIC
        }
    }
}

fn export_string(text: String, out: *mut *mut c_char) -> i32 {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_error("string contains interior NUL".into());
            return STX_ERR_INVALID;
        }
    };
    unsafe { *out = c.into_raw() };
    STX_OK
}

/// Build the full dossier for the twist y^2 = x^3 + t^(p^f) - t over
/// F_(p^nu)(t) and store a handle in `out`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
/// On STX_OK the handle must be released with stx_dossier_free.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_new(
    p: u64,
    nu: u32,
    f: u32,
    out: *mut *mut StxDossier,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null".into());
            return STX_ERR_INVALID;
        }
        let built = TwistParams::new(p, nu, f)
            .and_then(|params| assemble_dossier(&params, &PipelineConfig::default()));
        match built {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(StxDossier { inner })) };
                STX_OK
            }
            Err(e) => {
                set_error(e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Release a dossier handle.  A null handle is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer returned by stx_dossier_new that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_free(handle: *mut StxDossier) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

unsafe fn with_dossier<T, F: FnOnce(&Dossier) -> T>(
    handle: *const StxDossier,
    out: *mut T,
    read: F,
) -> i32 {
    if handle.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return STX_ERR_INVALID;
    }
    let value = read(unsafe { &(*handle).inner });
    unsafe { *out = value };
    STX_OK
}

/// Canonical JSON for the dossier; the string is owned by the caller.
///
/// # Safety
/// `handle` must be a live handle from stx_dossier_new; `out` must point
/// to writable storage for one pointer.  Release the string with
/// stx_string_free.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_json(
    handle: *const StxDossier,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("null pointer argument".into());
            return STX_ERR_INVALID;
        }
        export_string(dossier_json(unsafe { &(*handle).inner }), out)
    })
}

/// Analytic rank (equals the Mordell-Weil rank here).
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_rank(handle: *const StxDossier, out: *mut u32) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.rank) })
}

/// Degree of the L-polynomial, 2(q-1).
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_l_degree(handle: *const StxDossier, out: *mut u64) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.l_polynomial.degree) })
}

/// Sign of the functional equation, +1 or -1.
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_functional_sign(
    handle: *const StxDossier,
    out: *mut i8,
) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.functional_equation_sign) })
}

/// p-adic valuation of the special value L*.
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_ord_p_lstar(
    handle: *const StxDossier,
    out: *mut i64,
) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.ord_p_lstar) })
}

/// Dimension of Sha: floor(q/6) when p = -1 mod 6, else 0.
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_dim_sha(handle: *const StxDossier, out: *mut u64) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.dim_sha) })
}

/// Brauer-Siegel ratio log(Reg |Sha|) / log H.
///
/// # Safety
/// `handle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_brauer_siegel(
    handle: *const StxDossier,
    out: *mut f64,
) -> i32 {
    guarded(|| unsafe { with_dossier(handle, out, |d| d.brauer_siegel.ratio) })
}

/// Exact special value L* as a "num/den" string owned by the caller.
///
/// # Safety
/// `handle` must be a live handle; `out` must point to writable storage
/// for one pointer.  Release the string with stx_string_free.
#[no_mangle]
pub unsafe extern "C" fn stx_dossier_lstar(
    handle: *const StxDossier,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if handle.is_null() || out.is_null() {
            set_error("null pointer argument".into());
            return STX_ERR_INVALID;
        }
        export_string(unsafe { (*handle).inner.lstar.clone() }, out)
    })
}

/// Message for the most recent error on this thread, or null if none.
/// The string is owned by the caller.
///
/// # Safety
/// The returned pointer, when non-null, must be released with
/// stx_string_free.
#[no_mangle]
pub unsafe extern "C" fn stx_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.clone().into_raw())
            .unwrap_or(std::ptr::null_mut())
    })
}

/// Release a string returned by this library.  A null pointer is a no-op.
///
/// # Safety
/// `text` must be null or a string pointer returned by this library that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn stx_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
