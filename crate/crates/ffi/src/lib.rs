//! C ABI over the varmult engine.
//!
//! Every entry point returns a [`VmStatus`]; on failure the message is
//! available from [`vm_last_error_message`] on the same thread. Strings
//! handed out by the library are released with [`vm_string_free`], handles
//! with their matching `_free` function. No entry point unwinds across the
//! boundary: panics become `VM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::Value;
use varmult::classify2d::{classify_with, ClassifyError};
use varmult::doc::{self, DocError, LagrangianDoc, MultiplierDoc, StructureDoc, SystemDoc};
use varmult::jetgeom::{FGordonSystem, SystemError};
use varmult::liealgebra::{biinvariant_forms, killing_form, lie_system};
use varmult::multspace::{analyze, MultiplierError, MultiplierOptions, MultiplierReport};
use varmult::varlagrange::verify_multiplier;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Well-formed JSON with the wrong shape, or an invalid system.
    InvalidInput = 3,
    /// Malformed JSON or an expression that does not parse.
    ParseError = 4,
    /// The system has no first-order multiplier at all.
    NotNormalForm = 5,
    Internal = 6,
    Panic = 7,
}

/// Opaque handle to a parsed system.
pub struct VmSystem {
    sys: FGordonSystem,
}

/// Opaque handle to a multiplier analysis.
pub struct VmReport {
    report: MultiplierReport,
    json: Value,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(VmStatus, String);

impl From<DocError> for Fail {
    fn from(e: DocError) -> Self {
        let status = match &e {
            DocError::Json(j) if j.is_syntax() || j.is_eof() => VmStatus::ParseError,
            DocError::Parse { .. } | DocError::System(SystemError::Parse { .. }) => VmStatus::ParseError,
            _ => VmStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

impl From<ClassifyError> for Fail {
    fn from(e: ClassifyError) -> Self {
        let status = match e {
            ClassifyError::Dimension(_) => VmStatus::InvalidInput,
            _ => VmStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            VmStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            VmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(VmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(VmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn parse_doc<T: serde::de::DeserializeOwned>(p: *const c_char, what: &str) -> Result<T, Fail> {
    let s = read_str(p, what)?;
    serde_json::from_str(s).map_err(|e| Fail::from(DocError::from(e)))
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Fail> {
    let s = serde_json::to_string(v).map_err(|e| Fail(VmStatus::Internal, e.to_string()))?;
    let c = CString::new(s).map_err(|e| Fail(VmStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn sys_ref<'a>(p: *const VmSystem) -> Result<&'a FGordonSystem, Fail> {
    p.as_ref().map(|s| &s.sys).ok_or_else(|| null("system"))
}

/// Parse a system document `{"m": .., "dependent": [..], "f": [..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_system_new_from_json(json: *const c_char, out: *mut *mut VmSystem) -> VmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let sys = parse_doc::<SystemDoc>(json, "json")?.to_system()?;
        *out = Box::into_raw(Box::new(VmSystem { sys }));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from [`vm_system_new_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_system_free(sys: *mut VmSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of dependent variables.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_system_m(sys: *const VmSystem, out: *mut usize) -> VmStatus {
    guard(|| {
        let s = sys_ref(sys)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.m();
        Ok(())
    })
}

/// Run the multiplier analysis. A system outside normal form yields
/// `VM_STATUS_NOT_NORMAL_FORM` and no report.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_analyze_multipliers(
    sys: *const VmSystem,
    seed: u64,
    degree_cap: u32,
    out: *mut *mut VmReport,
) -> VmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = sys_ref(sys)?;
        let opts = MultiplierOptions {
            seed,
            degree_cap: degree_cap as usize,
            reconstruct: true,
        };
        let report = analyze(s, &opts).map_err(|e| match e {
            MultiplierError::NotNormalForm(_) => Fail(VmStatus::NotNormalForm, e.to_string()),
            _ => Fail(VmStatus::Internal, e.to_string()),
        })?;
        let json = doc::multiplier_report_json(&report, s, degree_cap as usize);
        *out = Box::into_raw(Box::new(VmReport { report, json }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`vm_analyze_multipliers`] or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_report_free(report: *mut VmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn report_field(
    report: *const VmReport,
    out: *mut usize,
    f: impl FnOnce(&MultiplierReport) -> usize,
) -> VmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = f(&r.report);
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_report_dimension(report: *const VmReport, out: *mut usize) -> VmStatus {
    report_field(report, out, |r| r.dimension)
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_report_rank(report: *const VmReport, out: *mut usize) -> VmStatus {
    report_field(report, out, |r| r.rank)
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_report_stage(report: *const VmReport, out: *mut usize) -> VmStatus {
    report_field(report, out, |r| r.stage)
}

/// The full report as JSON; free with [`vm_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_report_to_json(report: *const VmReport, out: *mut *mut c_char) -> VmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_json(out, &r.json)
    })
}

/// Normal form, H, K, S, connection form and multiplier conditions as JSON.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_invariants_json(sys: *const VmSystem, out: *mut *mut c_char) -> VmStatus {
    guard(|| {
        let s = sys_ref(sys)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = doc::invariants_report(s).map_err(|e| Fail(VmStatus::Internal, e.to_string()))?;
        write_json(out, &v)
    })
}

/// Two-component classification verdict as JSON.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_classify_json(sys: *const VmSystem, seed: u64, out: *mut *mut c_char) -> VmStatus {
    guard(|| {
        let s = sys_ref(sys)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = classify_with(s, seed)?;
        write_json(out, &doc::verdict_json(&v, s.names()))
    })
}

/// Off-shell check of `E(L) = M (u_xy - f)`. `lagrangian` is a JSON string
/// or `{"L": ..}` or `{"R", "Q", "P", "N"}`; `multiplier` a JSON matrix.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn vm_verify_multiplier(
    sys: *const VmSystem,
    lagrangian: *const c_char,
    multiplier: *const c_char,
    holds: *mut bool,
) -> VmStatus {
    guard(|| {
        let s = sys_ref(sys)?;
        if holds.is_null() {
            return Err(null("holds"));
        }
        let l = parse_doc::<LagrangianDoc>(lagrangian, "lagrangian")?.to_lagrangian(s.names())?;
        let m = parse_doc::<MultiplierDoc>(multiplier, "multiplier")?.to_matrix(s.names())?;
        let v = verify_multiplier(&l, &m, s).map_err(|e| Fail(VmStatus::InvalidInput, e.to_string()))?;
        *holds = v.holds;
        Ok(())
    })
}

/// Killing form, bi-invariant forms and the associated system for a
/// structure-constant document `{"m": .., "brackets": [..]}`.
///
/// # Safety
/// `structure` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vm_lie_json(structure: *const c_char, out: *mut *mut c_char) -> VmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sc = parse_doc::<StructureDoc>(structure, "structure")?.to_constants()?;
        let forms = biinvariant_forms(&sc);
        let v = serde_json::json!({
            "structure": doc::structure_json(&sc),
            "killing_form": doc::qmatrix_json(&killing_form(&sc)),
            "biinvariant_dimension": forms.len(),
            "biinvariant_basis": forms.iter().map(doc::qmatrix_json).collect::<Vec<_>>(),
            "system": doc::system_json(&lie_system(&sc)),
        });
        write_json(out, &v)
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread; empty after a
/// success. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn vm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
