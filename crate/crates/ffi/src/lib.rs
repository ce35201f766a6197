//! C ABI over `engel_vfg`.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `_free` function. Every fallible call returns an
//! [`EvfgStatus`]; on anything but `Ok` a message is available from
//! [`evfg_last_error`] on the same thread. Strings returned through `out`
//! parameters must be released with [`evfg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use engel_vfg::classify::predict_locally_nilpotent;
use engel_vfg::harness::{analyze_case, run_suite, suite_document, SuiteConfig};
use engel_vfg::unit_group::{EngelMode, UnitGroup, DEFAULT_ENGEL_EXHAUSTIVE_MAX};
use engel_vfg::{EnumerationBudget, Error, FiniteField, GroupAlgebra, GroupSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvfgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    Io = 4,
    /// A panic or an internal fault; the handle arguments are still valid.
    Internal = 5,
}

/// A group algebra `FG`.
pub struct EvfgAlgebra {
    inner: GroupAlgebra,
}

/// An enumerated normalized unit group `V(FG)`.
pub struct EvfgUnitGroup {
    inner: UnitGroup,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (EvfgStatus, String);

fn set_last_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn from_error(e: Error) -> Failure {
    let status = match e {
        Error::BudgetExceeded { .. } | Error::LatticeBudget { .. } => EvfgStatus::BudgetExceeded,
        Error::Io(_) => EvfgStatus::Io,
        Error::Fault(_) => EvfgStatus::Internal,
        _ => EvfgStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EvfgStatus {
    set_last_error(None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EvfgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("panic inside engel_vfg".into()));
            EvfgStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    (EvfgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (EvfgStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| (EvfgStatus::Internal, "string has an interior NUL".to_string()))?;
    write_out(out, c.into_raw(), "out")
}

unsafe fn algebra_ref<'a>(p: *const EvfgAlgebra) -> Result<&'a EvfgAlgebra, Failure> {
    p.as_ref().ok_or_else(|| null("algebra"))
}

unsafe fn units_ref<'a>(p: *const EvfgUnitGroup) -> Result<&'a EvfgUnitGroup, Failure> {
    p.as_ref().ok_or_else(|| null("units"))
}

/// Last error message of this thread, or null. Valid until the next call
/// into this library on the same thread.
#[no_mangle]
pub extern "C" fn evfg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn evfg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn evfg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `FG` from a group spec such as `"D4xC3"` and a field order such
/// as `"4"`.
///
/// # Safety
/// `group` and `field` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_algebra_new(group: *const c_char, field: *const c_char, out: *mut *mut EvfgAlgebra) -> EvfgStatus {
    guard(|| {
        let group = GroupSpec::parse(str_arg(group, "group")?).and_then(|s| s.build()).map_err(from_error)?;
        let field = FiniteField::parse(str_arg(field, "field")?).map_err(from_error)?;
        let alg = EvfgAlgebra { inner: GroupAlgebra::new(Arc::new(field), Arc::new(group)) };
        write_out(out, Box::into_raw(Box::new(alg)), "out")
    })
}

/// # Safety
/// `alg` must be null or a handle from [`evfg_algebra_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn evfg_algebra_free(alg: *mut EvfgAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// `|G|`, the dimension of `FG`.
///
/// # Safety
/// `alg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_algebra_dimension(alg: *const EvfgAlgebra, out: *mut usize) -> EvfgStatus {
    guard(|| write_out(out, algebra_ref(alg)?.inner.dim(), "out"))
}

/// Whether `V(FG)` is predicted to be nilpotent from `G` and `F` alone.
///
/// # Safety
/// `alg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_algebra_predict(alg: *const EvfgAlgebra, out: *mut bool) -> EvfgStatus {
    guard(|| {
        let a = &algebra_ref(alg)?.inner;
        write_out(out, predict_locally_nilpotent(a.group(), a.field()).locally_nilpotent, "out")
    })
}

/// Enumerates `V(FG)`, visiting at most `max_points` coefficient vectors.
///
/// # Safety
/// `alg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_units_enumerate(alg: *const EvfgAlgebra, max_points: u64, out: *mut *mut EvfgUnitGroup) -> EvfgStatus {
    guard(|| {
        let a = &algebra_ref(alg)?.inner;
        let budget = EnumerationBudget::new(max_points, max_points).map_err(from_error)?;
        let units = a.enumerate_normalized_units(&budget).map_err(from_error)?;
        write_out(out, Box::into_raw(Box::new(EvfgUnitGroup { inner: units })), "out")
    })
}

/// # Safety
/// `units` must be null or a handle from [`evfg_units_enumerate`], freed once.
#[no_mangle]
pub unsafe extern "C" fn evfg_units_free(units: *mut EvfgUnitGroup) {
    if !units.is_null() {
        drop(Box::from_raw(units));
    }
}

/// # Safety
/// `units` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_units_order(units: *const EvfgUnitGroup, out: *mut u64) -> EvfgStatus {
    guard(|| write_out(out, units_ref(units)?.inner.order() as u64, "out"))
}

/// Exhaustive Engel test; `BudgetExceeded` when `|V|` is above 4096.
///
/// # Safety
/// `units` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_units_is_engel(units: *const EvfgUnitGroup, out: *mut bool) -> EvfgStatus {
    guard(|| {
        let v = &units_ref(units)?.inner;
        let verdict = v.engel_test(EngelMode::Exhaustive { cap: DEFAULT_ENGEL_EXHAUSTIVE_MAX }).map_err(from_error)?;
        write_out(out, verdict.engel, "out")
    })
}

/// Nilpotency class of `V`; `*is_nilpotent` is false when the lower central
/// series stalls, and `*class` is then left untouched.
///
/// # Safety
/// `units` must be a live handle; `is_nilpotent` and `class` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_units_nilpotency_class(units: *const EvfgUnitGroup, is_nilpotent: *mut bool, class: *mut usize) -> EvfgStatus {
    guard(|| {
        let v = &units_ref(units)?.inner;
        let c = v.nilpotency_class(DEFAULT_ENGEL_EXHAUSTIVE_MAX).map_err(from_error)?;
        if class.is_null() {
            return Err(null("class"));
        }
        write_out(is_nilpotent, c.is_some(), "is_nilpotent")?;
        if let Some(c) = c {
            class.write(c);
        }
        Ok(())
    })
}

/// Full case report for one `(G, F)` as JSON.
///
/// # Safety
/// `group` and `field` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_analyze_json(
    group: *const c_char,
    field: *const c_char,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> EvfgStatus {
    guard(|| {
        let config = SuiteConfig { samples, seed, ..SuiteConfig::default() };
        let report = analyze_case(str_arg(group, "group")?, str_arg(field, "field")?, &config).map_err(from_error)?;
        let text = serde_json::to_string_pretty(&report).map_err(|e| (EvfgStatus::Internal, e.to_string()))?;
        write_string(out, text)
    })
}

/// Runs the corpus and returns the report document. `config_json` may be
/// null for the defaults, or a partial JSON object with the suite config
/// keys. `failures` (nullable) receives the number of failing checks.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` must be
/// writable; `failures` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn evfg_run_suite_json(config_json: *const c_char, out: *mut *mut c_char, failures: *mut usize) -> EvfgStatus {
    guard(|| {
        let config: SuiteConfig = if config_json.is_null() {
            SuiteConfig::default()
        } else {
            serde_json::from_str(str_arg(config_json, "config_json")?)
                .map_err(|e| (EvfgStatus::InvalidArgument, format!("config: {e}")))?
        };
        let doc = suite_document(&config, run_suite(&config).map_err(from_error)?);
        if !failures.is_null() {
            failures.write(doc.summary.fail);
        }
        write_string(out, doc.to_json().map_err(from_error)?)
    })
}
