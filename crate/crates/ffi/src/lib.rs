//! C ABI over the law-checking library. Scenarios and reports are opaque handles; every
//! call returns a [`WtStatus`] and leaves a message for [`wt_last_error`] on failure.
//! Strings handed out by the library are freed with [`wt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use webtaylor::ll::{Mutation, TruncCfg};
use webtaylor::scenario::{RunReport, Scenario, ScenarioError};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownSuite = 4,
    UnknownModel = 5,
    InvalidArgument = 6,
    Internal = 7,
}

/// A scenario under construction.
pub struct WtScenario(Scenario);

/// The outcome of running a scenario.
pub struct WtReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: WtStatus, msg: impl Into<String>) -> WtStatus {
    set_error(msg);
    status
}

fn scenario_status(e: &ScenarioError) -> WtStatus {
    match e {
        ScenarioError::Parse { .. } | ScenarioError::Read { .. } => WtStatus::Parse,
        ScenarioError::UnknownSuite(_) => WtStatus::UnknownSuite,
        ScenarioError::UnknownModel(_) => WtStatus::UnknownModel,
        ScenarioError::Invalid(_) | ScenarioError::Space(_) => WtStatus::InvalidArgument,
    }
}

/// Run `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> WtStatus) -> WtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WtStatus::Internal, "panic inside webtaylor"))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, WtStatus> {
    if p.is_null() {
        return Err(fail(WtStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(WtStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the most recent failure on this thread, or NULL. Owned by the library; valid
/// until the next failing call.
#[no_mangle]
pub extern "C" fn wt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default scenario: every model, every suite, seed 0.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_new(out: *mut *mut WtScenario) -> WtStatus {
    if out.is_null() {
        return fail(WtStatus::NullPointer, "null output pointer");
    }
    *out = Box::into_raw(Box::new(WtScenario(Scenario::default())));
    WtStatus::Ok
}

/// Parse a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_parse(toml: *const c_char, out: *mut *mut WtScenario) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return fail(WtStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Scenario::parse(text, "<scenario>").and_then(|s| s.validate().map(|_| s)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(WtScenario(s)));
                WtStatus::Ok
            }
            Err(e) => fail(scenario_status(&e), e.to_string()),
        }
    })
}

/// Set the model tag (`rel`, `pcoh`, ..., comma list, or `all`).
///
/// # Safety
/// `sc` must come from this library; `model` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_model(sc: *mut WtScenario, model: *const c_char) -> WtStatus {
    let Some(sc) = sc.as_mut() else { return fail(WtStatus::NullPointer, "null scenario") };
    let m = match read_str(model) {
        Ok(m) => m,
        Err(s) => return s,
    };
    let old = std::mem::replace(&mut sc.0.model, m.into());
    if let Err(e) = sc.0.models() {
        sc.0.model = old;
        return fail(scenario_status(&e), e.to_string());
    }
    WtStatus::Ok
}

/// Replace the suite list with a comma-separated list of ids or groups.
///
/// # Safety
/// `sc` must come from this library; `suites` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_suites(sc: *mut WtScenario, suites: *const c_char) -> WtStatus {
    let Some(sc) = sc.as_mut() else { return fail(WtStatus::NullPointer, "null scenario") };
    let list = match read_str(suites) {
        Ok(l) => l,
        Err(s) => return s,
    };
    let ids: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if let Err(e) = webtaylor::scenario::expand_suites(&ids) {
        return fail(scenario_status(&e), e.to_string());
    }
    sc.0.suites = ids;
    WtStatus::Ok
}

/// Set seed, sample count and truncation bounds in one call.
///
/// # Safety
/// `sc` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_params(
    sc: *mut WtScenario,
    seed: u64,
    samples: usize,
    bang_degree: usize,
    s_bound: usize,
) -> WtStatus {
    let Some(sc) = sc.as_mut() else { return fail(WtStatus::NullPointer, "null scenario") };
    let mut next = sc.0.clone();
    next.seed = seed;
    next.samples = samples;
    next.trunc = TruncCfg { bang_degree, s_bound };
    if let Err(e) = next.validate() {
        return fail(scenario_status(&e), e.to_string());
    }
    sc.0 = next;
    WtStatus::Ok
}

/// Corrupt a structural matrix: `dig`, `seely2`, `coalgebra`, or NULL to clear.
///
/// # Safety
/// `sc` must come from this library; `mutation` is NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_mutation(sc: *mut WtScenario, mutation: *const c_char) -> WtStatus {
    let Some(sc) = sc.as_mut() else { return fail(WtStatus::NullPointer, "null scenario") };
    if mutation.is_null() {
        sc.0.mutation = None;
        return WtStatus::Ok;
    }
    let m = match read_str(mutation) {
        Ok(m) => m,
        Err(s) => return s,
    };
    sc.0.mutation = Some(match m {
        "dig" => Mutation::Dig,
        "seely2" => Mutation::Seely2,
        "coalgebra" => Mutation::Coalgebra,
        other => return fail(WtStatus::InvalidArgument, format!("unknown mutation `{other}`")),
    });
    WtStatus::Ok
}

/// # Safety
/// `sc` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_free(sc: *mut WtScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Run every selected suite. A report is produced even when laws fail; check
/// [`wt_report_passed`].
///
/// # Safety
/// `sc` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_run(sc: *const WtScenario, out: *mut *mut WtReport) -> WtStatus {
    guard(|| {
        let Some(sc) = sc.as_ref() else { return fail(WtStatus::NullPointer, "null scenario") };
        if out.is_null() {
            return fail(WtStatus::NullPointer, "null output pointer");
        }
        match sc.0.run() {
            Ok(r) => {
                *out = Box::into_raw(Box::new(WtReport(r)));
                WtStatus::Ok
            }
            Err(e) => fail(scenario_status(&e), e.to_string()),
        }
    })
}

/// 1 when every case passed, 0 otherwise, -1 for a NULL handle.
///
/// # Safety
/// `r` is NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn wt_report_passed(r: *const WtReport) -> i32 {
    r.as_ref().map_or(-1, |r| i32::from(r.0.report.passed()))
}

/// Number of failing cases across all suites.
///
/// # Safety
/// `r` is NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn wt_report_failures(r: *const WtReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.report.failures().count())
}

/// Structured report as JSON. Free with [`wt_string_free`].
///
/// # Safety
/// `r` is NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn wt_report_json(r: *const WtReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| give_string(r.0.to_json()))
}

/// Human-readable summary. Free with [`wt_string_free`].
///
/// # Safety
/// `r` is NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn wt_report_text(r: *const WtReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| give_string(r.0.report.render_text()))
}

/// # Safety
/// `r` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_report_free(r: *mut WtReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` is NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
