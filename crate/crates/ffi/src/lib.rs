//! C ABI over `esc_count`.
//!
//! Groups are opaque handles created by [`esc_group_parse`] and released with
//! [`esc_group_free`]. Every fallible call returns an [`EscStatus`]; on
//! failure [`esc_last_error_message`] describes the error for the calling
//! thread. Strings handed out by the library are released with
//! [`esc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use esc_count::verify::{closed_form_value, known_values_table, sweep, Method, VerificationReport};
use esc_count::{AbelianGroup, Budget, EscError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BudgetExceeded = 4,
    InvalidArgument = 5,
    Disagreement = 6,
    Internal = 7,
}

/// Counting method for [`esc_count`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscMethod {
    /// Best applicable closed form.
    Closed = 0,
    Congruence = 1,
    Naive = 2,
    Orbits = 3,
}

/// Opaque finite abelian group.
pub struct EscGroup {
    inner: AbelianGroup,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &EscError) -> EscStatus {
    match err {
        EscError::Parse { .. } => EscStatus::Parse,
        EscError::BudgetExceeded { .. } => EscStatus::BudgetExceeded,
        EscError::NonIntegral(_) | EscError::Consistency(_) => EscStatus::Internal,
        _ => EscStatus::InvalidArgument,
    }
}

/// Run `body`, recording errors and converting panics.
fn guarded(body: impl FnOnce() -> Result<(), (EscStatus, String)>) -> EscStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EscStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EscStatus::Internal
        }
    }
}

fn from_esc(err: EscError) -> (EscStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (EscStatus, String) {
    (EscStatus::NullPointer, format!("{what} is null"))
}

fn to_c_string(s: String) -> Result<*mut c_char, (EscStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (EscStatus::Internal, "string contains NUL".into()))
}

fn budget() -> Result<Budget, (EscStatus, String)> {
    Budget::from_env().map_err(from_esc)
}

/// Parse a group spec such as `"C12"`, `"C4xC2"` or `"C3^2"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esc_group_parse(spec: *const c_char, out: *mut *mut EscGroup) -> EscStatus {
    guarded(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|e| (EscStatus::InvalidUtf8, e.to_string()))?;
        let group = AbelianGroup::parse(text).map_err(from_esc)?;
        *out = Box::into_raw(Box::new(EscGroup { inner: group }));
        Ok(())
    })
}

/// Release a group. Null is ignored.
///
/// # Safety
/// `group` must come from [`esc_group_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn esc_group_free(group: *mut EscGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Order `|G|`.
///
/// # Safety
/// `group` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esc_group_order(group: *const EscGroup, out: *mut u64) -> EscStatus {
    guarded(|| {
        let group = group.as_ref().ok_or_else(|| null("group"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = group.inner.order();
        Ok(())
    })
}

/// Canonical spec of the group, e.g. `"C4xC3"` for `"C12"`. Release the
/// string with [`esc_string_free`].
///
/// # Safety
/// `group` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esc_group_canonical(group: *const EscGroup, out: *mut *mut c_char) -> EscStatus {
    guarded(|| {
        let group = group.as_ref().ok_or_else(|| null("group"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = to_c_string(group.inner.to_string())?;
        Ok(())
    })
}

/// `N(G, n)` as a decimal string. Release it with [`esc_string_free`].
///
/// # Safety
/// `group` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esc_count(
    group: *const EscGroup,
    n: u32,
    method: EscMethod,
    out: *mut *mut c_char,
) -> EscStatus {
    guarded(|| {
        let group = group.as_ref().ok_or_else(|| null("group"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if n == 0 {
            return Err((EscStatus::InvalidArgument, "n must be at least 1".into()));
        }
        let budget = budget()?;
        let n = n as usize;
        let g = &group.inner;
        let value = match method {
            EscMethod::Closed => closed_form_value(g, n, &budget).map(|(_, v)| v),
            EscMethod::Congruence => Method::Congruence.evaluate(g, n, &budget),
            EscMethod::Naive => Method::Naive.evaluate(g, n, &budget),
            EscMethod::Orbits => Method::Orbits.evaluate(g, n, &budget),
        }
        .map_err(from_esc)?;
        *out = to_c_string(value.to_string())?;
        Ok(())
    })
}

/// Cross-check every method on all abelian groups of order `<= max_order`
/// for `1 <= n <= max_n`, plus the table of known values. Writes the number
/// of flagged disagreements to `disagreements` (if non-null) and returns
/// `Disagreement` when it is nonzero.
///
/// # Safety
/// `disagreements` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esc_verify(max_order: u64, max_n: u32, disagreements: *mut u64) -> EscStatus {
    guarded(|| {
        if max_n == 0 {
            return Err((EscStatus::InvalidArgument, "max_n must be at least 1".into()));
        }
        let budget = budget()?;
        let swept = sweep(max_order, max_n as usize, &budget).map_err(from_esc)?;
        let known = known_values_table(&budget).map_err(from_esc)?;
        let report = VerificationReport::from_parts(swept.cases, known);
        let flagged = report.flags.len() as u64;
        if let Some(slot) = disagreements.as_mut() {
            *slot = flagged;
        }
        if flagged == 0 {
            Ok(())
        } else {
            Err((EscStatus::Disagreement, report.flags.join("; ")))
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn esc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn esc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn esc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
