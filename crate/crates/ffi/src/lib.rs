//! C ABI over `grassmann-kernel`.
//!
//! Every function returns a [`GkStatus`]; on failure the message is available from
//! [`gk_last_error_message`] on the same thread. Objects are opaque handles released
//! with their `_free` function, and strings handed out are released with
//! [`gk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grassmann_kernel::dsl::{emit_report, parse_model, run_model, Item, Model, RunOptions};
use grassmann_kernel::grassmann::GrassmannElement;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    KernelError = 4,
    Panic = 5,
}

/// A parsed document.
pub struct GkModel(Model);

/// An element of a free Grassmann algebra.
pub struct GkElement(GrassmannElement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(GkStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GkStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GkStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(GkStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(GkStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn out<T>(p: *mut T) -> Result<&'static mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(GkStatus::NullArgument, "null output pointer".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(GkStatus::NullArgument, "null handle".into()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap().into_raw()
}

fn diagnostics(diags: &[grassmann_kernel::dsl::Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn gk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `source` must be NUL-terminated; `model` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_model_parse(source: *const c_char, model: *mut *mut GkModel) -> GkStatus {
    guard(|| {
        let slot = out(model)?;
        *slot = ptr::null_mut();
        let parsed = parse_model(text(source)?).map_err(|d| Failure(GkStatus::ParseError, diagnostics(&d)))?;
        *slot = Box::into_raw(Box::new(GkModel(parsed)));
        Ok(())
    })
}

/// Runs every command and writes the JSON report. `exit_code` may be NULL.
///
/// # Safety
/// `model` must come from [`gk_model_parse`]; `json` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_model_run_json(
    model: *const GkModel,
    seed: u64,
    json: *mut *mut c_char,
    exit_code: *mut i32,
) -> GkStatus {
    guard(|| {
        let slot = out(json)?;
        *slot = ptr::null_mut();
        let m = handle(model)?;
        let report = run_model(&m.0, &RunOptions { seed, max_degree: None, unicode: false });
        if let Some(code) = exit_code.as_mut() {
            *code = report.exit_code();
        }
        *slot = c_string(emit_report(&report.to_json()));
        Ok(())
    })
}

/// Canonical text of the document.
///
/// # Safety
/// `model` must come from [`gk_model_parse`]; `text_out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_model_to_text(model: *const GkModel, text_out: *mut *mut c_char) -> GkStatus {
    guard(|| {
        let slot = out(text_out)?;
        *slot = c_string(handle(model)?.0.to_text());
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`gk_model_parse`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn gk_model_free(model: *mut GkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parses an expression in `x1..xp`, `t1..tq` into an element of the free algebra.
///
/// # Safety
/// `expr` must be NUL-terminated; `element` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_element_parse(p: u32, q: u32, expr: *const c_char, element: *mut *mut GkElement) -> GkStatus {
    guard(|| {
        let slot = out(element)?;
        *slot = ptr::null_mut();
        let expr = text(expr)?;
        if expr.contains([';', '{', '}']) {
            return Err(Failure(GkStatus::ParseError, "expression contains a statement separator".into()));
        }
        let doc = format!("ring p={p} q={q};\nelement e = {expr};\n");
        let model = parse_model(&doc).map_err(|d| Failure(GkStatus::ParseError, diagnostics(&d)))?;
        let value = model
            .items
            .into_iter()
            .find_map(|i| match i {
                Item::Element { value, .. } => Some(value),
                _ => None,
            })
            .ok_or_else(|| Failure(GkStatus::ParseError, "no expression".into()))?;
        *slot = Box::into_raw(Box::new(GkElement(value)));
        Ok(())
    })
}

unsafe fn binary(
    a: *const GkElement,
    b: *const GkElement,
    result: *mut *mut GkElement,
    op: fn(&GrassmannElement, &GrassmannElement) -> grassmann_kernel::Result<GrassmannElement>,
) -> GkStatus {
    guard(|| {
        let slot = out(result)?;
        *slot = ptr::null_mut();
        let value = op(&handle(a)?.0, &handle(b)?.0).map_err(|e| Failure(GkStatus::KernelError, e.to_string()))?;
        *slot = Box::into_raw(Box::new(GkElement(value)));
        Ok(())
    })
}

/// Graded product `a * b`.
///
/// # Safety
/// `a` and `b` must be live element handles; `result` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_element_mul(a: *const GkElement, b: *const GkElement, result: *mut *mut GkElement) -> GkStatus {
    binary(a, b, result, GrassmannElement::gmul)
}

/// Sum `a + b`.
///
/// # Safety
/// `a` and `b` must be live element handles; `result` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_element_add(a: *const GkElement, b: *const GkElement, result: *mut *mut GkElement) -> GkStatus {
    binary(a, b, result, GrassmannElement::try_add)
}

/// # Safety
/// `element` must be a live handle; `text_out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gk_element_to_string(element: *const GkElement, text_out: *mut *mut c_char) -> GkStatus {
    guard(|| {
        let slot = out(text_out)?;
        *slot = c_string(handle(element)?.0.to_string());
        Ok(())
    })
}

/// # Safety
/// `element` must be a live handle and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn gk_element_free(element: *mut GkElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn gk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
