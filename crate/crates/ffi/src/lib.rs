//! C interface to the `xtt` transducer engine.
//!
//! Every function returns an [`XttStatus`]; on failure a description is
//! available from [`xtt_last_error_message`] on the same thread. Handles are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xtt::{load_rules, parse_sexpr, transduce, TransduceOptions, Transducer, TransductionResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XttStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    LoadError = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct XttClassification {
    pub linear: bool,
    pub nondeleting: bool,
    pub extended: bool,
}

/// A loaded rule set.
pub struct XttTransducer(Transducer);

/// Outputs of one transduction, sorted by weight then tree.
pub struct XttResult(TransductionResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: XttStatus, message: impl Into<String>) -> XttStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> XttStatus) -> XttStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(XttStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, XttStatus> {
    if text.is_null() {
        return Err(fail(XttStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(XttStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Message for the last failure on this thread. The pointer stays valid until
/// the next failing call on the same thread. Empty if nothing has failed.
#[no_mangle]
pub extern "C" fn xtt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a YAML rule file held in `yaml` and stores a new handle in `out`.
///
/// # Safety
/// `yaml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_transducer_load(yaml: *const c_char, out: *mut *mut XttTransducer) -> XttStatus {
    guard(|| {
        if out.is_null() {
            return fail(XttStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(yaml, "yaml") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match load_rules(text) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(XttTransducer(t)));
                XttStatus::Ok
            }
            Err(e) => fail(XttStatus::LoadError, e.to_string()),
        }
    })
}

/// # Safety
/// `transducer` must be null or a handle from [`xtt_transducer_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xtt_transducer_free(transducer: *mut XttTransducer) {
    if !transducer.is_null() {
        drop(Box::from_raw(transducer));
    }
}

/// # Safety
/// `transducer` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_transducer_rule_count(transducer: *const XttTransducer, out: *mut usize) -> XttStatus {
    guard(|| {
        if transducer.is_null() || out.is_null() {
            return fail(XttStatus::NullPointer, "null argument");
        }
        let t = &*transducer;
        *out = t.0.len();
        XttStatus::Ok
    })
}

/// # Safety
/// `transducer` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_transducer_classify(
    transducer: *const XttTransducer,
    out: *mut XttClassification,
) -> XttStatus {
    guard(|| {
        if transducer.is_null() || out.is_null() {
            return fail(XttStatus::NullPointer, "null argument");
        }
        let t = &*transducer;
        let c = t.0.classify();
        *out = XttClassification {
            linear: c.linear,
            nondeleting: c.nondeleting,
            extended: c.extended,
        };
        XttStatus::Ok
    })
}

/// Transduces the s-expression `tree`. A `beam` of 0 keeps every
/// configuration; a `max_steps` of 0 uses the engine default.
///
/// # Safety
/// `transducer` must be a live handle, `tree` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_transduce(
    transducer: *const XttTransducer,
    tree: *const c_char,
    beam: usize,
    max_steps: usize,
    out: *mut *mut XttResult,
) -> XttStatus {
    guard(|| {
        if transducer.is_null() || out.is_null() {
            return fail(XttStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let text = match read_str(tree, "tree") {
            Ok(t) => t,
            Err(status) => return status,
        };
        let input = match parse_sexpr(text) {
            Ok(t) => t,
            Err(e) => return fail(XttStatus::ParseError, e.to_string()),
        };
        let mut options = TransduceOptions::default().with_beam(beam);
        if max_steps > 0 {
            options = options.with_max_steps(max_steps);
        }
        let result = transduce(&input, &(*transducer).0, &options);
        *out = Box::into_raw(Box::new(XttResult(result)));
        XttStatus::Ok
    })
}

/// # Safety
/// `result` must be null or a handle from [`xtt_transduce`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_free(result: *mut XttResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of complete outputs; 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_output_count(result: *const XttResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.outputs.len())
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_stuck_count(result: *const XttResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.stuck_count)
}

/// Whether the beam or the step cap cut the search short.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_truncated(result: *const XttResult) -> bool {
    result.as_ref().is_some_and(|r| r.0.truncated)
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_weight(result: *const XttResult, index: usize, out: *mut f64) -> XttStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(XttStatus::NullPointer, "null argument");
        }
        let r = &*result;
        match r.0.outputs.get(index) {
            Some(o) => {
                *out = o.weight;
                XttStatus::Ok
            }
            None => fail(XttStatus::OutOfRange, format!("output index {index} out of range")),
        }
    })
}

/// Stores the serialized output tree in `out`. Release it with
/// [`xtt_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtt_result_tree(result: *const XttResult, index: usize, out: *mut *mut c_char) -> XttStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            return fail(XttStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let r = &*result;
        let Some(o) = r.0.outputs.get(index) else {
            return fail(XttStatus::OutOfRange, format!("output index {index} out of range"));
        };
        match CString::new(o.tree.to_string()) {
            Ok(s) => {
                *out = s.into_raw();
                XttStatus::Ok
            }
            Err(_) => fail(XttStatus::InvalidUtf8, "output tree contains a NUL byte"),
        }
    })
}

/// # Safety
/// `text` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xtt_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
