//! C interface to the `lacunary` crate.
//!
//! Fields and polynomials are opaque handles created by `lac_*_new` /
//! `lac_*_parse` and released with the matching `_free`. Every fallible
//! call returns a [`LacStatus`]; on failure a message is available from
//! [`lac_last_error_message`] on the same thread. Strings returned through
//! `char **` are owned by the caller and released with [`lac_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use lacunary::bounds::{best, bound_all};
use lacunary::{FieldCtx, SparsePoly};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    FieldError = 3,
    ParseError = 4,
    BoundError = 5,
    BufferTooSmall = 6,
    NotApplicable = 7,
    Panic = 8,
}

/// A finite field.
pub struct LacField(Arc<FieldCtx>);

/// A sparse polynomial over a [`LacField`].
pub struct LacPoly(SparsePoly);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let msg = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: LacStatus, msg: impl ToString) -> LacStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> LacStatus) -> LacStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == LacStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(LacStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LacStatus> {
    if s.is_null() {
        return Err(fail(LacStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(LacStatus::InvalidUtf8, e))
}

fn give_string(s: String, out: *mut *mut c_char) -> LacStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: checked non-null by every caller.
            unsafe { *out = c.into_raw() };
            LacStatus::Ok
        }
        Err(e) => fail(LacStatus::InvalidUtf8, e),
    }
}

/// Creates `F_{p^k}` with the default modulus.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn lac_field_new(p: u64, k: u32, out: *mut *mut LacField) -> LacStatus {
    guard(|| {
        if out.is_null() {
            return fail(LacStatus::NullPointer, "null out pointer");
        }
        match FieldCtx::new(p, k, None) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(LacField(Arc::new(ctx))));
                LacStatus::Ok
            }
            Err(e) => fail(LacStatus::FieldError, e),
        }
    })
}

/// Parses a field spec such as `47`, `3^2` or `3^2:1,0,1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lac_field_parse(spec: *const c_char, out: *mut *mut LacField) -> LacStatus {
    guard(|| {
        if out.is_null() {
            return fail(LacStatus::NullPointer, "null out pointer");
        }
        let spec = match read_str(spec) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match spec.parse::<FieldCtx>() {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(LacField(Arc::new(ctx))));
                LacStatus::Ok
            }
            Err(e) => fail(LacStatus::FieldError, e),
        }
    })
}

/// # Safety
/// `field` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lac_field_free(field: *mut LacField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Field size, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lac_field_q(field: *const LacField) -> u64 {
    field.as_ref().map_or(0, |f| f.0.q())
}

/// # Safety
/// `field` must be a live handle, `text` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lac_poly_parse(field: *const LacField, text: *const c_char, out: *mut *mut LacPoly) -> LacStatus {
    guard(|| {
        let Some(field) = field.as_ref() else {
            return fail(LacStatus::NullPointer, "null field");
        };
        if out.is_null() {
            return fail(LacStatus::NullPointer, "null out pointer");
        }
        let text = match read_str(text) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match SparsePoly::parse(text, field.0.clone()) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(LacPoly(p)));
                LacStatus::Ok
            }
            Err(e) => fail(LacStatus::ParseError, e),
        }
    })
}

/// # Safety
/// `poly` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lac_poly_free(poly: *mut LacPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Renders in the parse grammar.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lac_poly_render(poly: *const LacPoly, out: *mut *mut c_char) -> LacStatus {
    guard(|| {
        let Some(poly) = poly.as_ref() else {
            return fail(LacStatus::NullPointer, "null poly");
        };
        if out.is_null() {
            return fail(LacStatus::NullPointer, "null out pointer");
        }
        give_string(poly.0.to_string(), out)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn lac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Nonzero roots in ascending packed order. `*count` is always set to the
/// number of roots; if it exceeds `capacity` nothing is written to `buf`
/// and `LAC_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `poly` must be a live handle, `count` writable, and `buf` valid for
/// `capacity` writes (it may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn lac_poly_roots(poly: *const LacPoly, buf: *mut u64, capacity: usize, count: *mut usize) -> LacStatus {
    guard(|| {
        let Some(poly) = poly.as_ref() else {
            return fail(LacStatus::NullPointer, "null poly");
        };
        if count.is_null() {
            return fail(LacStatus::NullPointer, "null count");
        }
        let report = match poly.0.count_roots_bruteforce() {
            Ok(r) => r,
            Err(e) => return fail(LacStatus::FieldError, e),
        };
        *count = report.count;
        if report.count > capacity {
            return fail(LacStatus::BufferTooSmall, format!("{} roots, capacity {capacity}", report.count));
        }
        if report.count > 0 && buf.is_null() {
            return fail(LacStatus::NullPointer, "null buffer");
        }
        for (i, r) in report.roots.iter().enumerate() {
            *buf.add(i) = r.value();
        }
        LacStatus::Ok
    })
}

/// Every bound as a JSON array. `d = 0` tries every divisor of `q - 1`.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lac_bound_all_json(poly: *const LacPoly, d: u64, out: *mut *mut c_char) -> LacStatus {
    guard(|| {
        let Some(poly) = poly.as_ref() else {
            return fail(LacStatus::NullPointer, "null poly");
        };
        if out.is_null() {
            return fail(LacStatus::NullPointer, "null out pointer");
        }
        match bound_all(&poly.0, (d != 0).then_some(d)) {
            Ok(outcomes) => match serde_json::to_string(&outcomes) {
                Ok(s) => give_string(s, out),
                Err(e) => fail(LacStatus::BoundError, e),
            },
            Err(e) => fail(LacStatus::BoundError, e),
        }
    })
}

/// Smallest applicable bound. `d = 0` tries every divisor of `q - 1`.
///
/// # Safety
/// `poly` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn lac_best_bound(poly: *const LacPoly, d: u64, value: *mut u64) -> LacStatus {
    guard(|| {
        let Some(poly) = poly.as_ref() else {
            return fail(LacStatus::NullPointer, "null poly");
        };
        if value.is_null() {
            return fail(LacStatus::NullPointer, "null value");
        }
        match bound_all(&poly.0, (d != 0).then_some(d)) {
            Ok(outcomes) => match best(&outcomes).and_then(|b| b.value) {
                Some(v) => {
                    *value = v;
                    LacStatus::Ok
                }
                None => fail(LacStatus::NotApplicable, "no bound applies"),
            },
            Err(e) => fail(LacStatus::BoundError, e),
        }
    })
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lac_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
