//! C ABI over `shellcore`.
//!
//! Systems and lattice files are opaque handles created by `*_parse` and
//! released by `*_free`. Every fallible call returns an [`ScStatus`]; on
//! failure [`sc_last_error`] describes the problem. Strings handed out by
//! the library are freed with [`sc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use shellcore::completeness::{complete_core, complete_shell, FnSet};
use shellcore::kripke::{KripkeError, TransitionSystem};
use shellcore::lattice::{parse_lat, LatFile};
use shellcore::mucalc::{is_branchable, is_ltl_det, parse_formula};
use shellcore::suite::{SuiteConfig, SuiteError};
use shellcore::traces::Model;

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    /// A required pointer argument was null.
    Null = 1,
    /// A string argument was not UTF-8.
    Utf8 = 2,
    /// A system, formula or lattice file did not parse, or a name is unknown.
    Parse = 3,
    /// The trace universe cannot hold the system's paths.
    Universe = 4,
    /// An enumeration would exceed its cap.
    Cap = 5,
    /// Anything else, including a caught panic.
    Internal = 6,
}

/// A transition system, made total on parse.
pub struct ScSystem {
    system: TransitionSystem,
    added_loops: usize,
    model: Option<Model>,
}

/// A parsed lattice file with its domains and functions.
pub struct ScLattice {
    file: LatFile,
}

/// Result of comparing trace and state semantics of a formula.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScCheck {
    /// Universal abstraction of the trace semantics, bit `i` for state `i`.
    pub alpha_mask: u64,
    /// State semantics, same encoding.
    pub state_mask: u64,
    pub branchable: bool,
    /// Membership in the deterministic fragment.
    pub deterministic: bool,
}

/// Which extremal closure to compute.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScMode {
    Shell = 0,
    Core = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(ScStatus, String);

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            ScStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScStatus::Internal
        }
    }
}

fn parse_failure(e: impl std::fmt::Display) -> Failure {
    Failure(ScStatus::Parse, e.to_string())
}

/// # Safety
/// `text` is null or a NUL-terminated string valid for the call.
unsafe fn text_arg<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(Failure(ScStatus::Null, format!("{what} is null")));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| Failure(ScStatus::Utf8, format!("{what} is not UTF-8")))
}

fn out_arg<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a pointer valid for writes
    unsafe { out.as_mut() }.ok_or_else(|| Failure(ScStatus::Null, format!("{what} is null")))
}

fn system_arg<'a>(system: *mut ScSystem) -> Result<&'a mut ScSystem, Failure> {
    out_arg(system, "system")
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `text` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Parses a system in the text format and totalizes it.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_system_parse(text: *const c_char, out: *mut *mut ScSystem) -> ScStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let parsed = TransitionSystem::parse(text_arg(text, "text")?).map_err(parse_failure)?;
        let totalized = parsed.totalize();
        *out = Box::into_raw(Box::new(ScSystem {
            system: totalized.system,
            added_loops: totalized.added_loops.len(),
            model: None,
        }));
        Ok(())
    })
}

/// # Safety
/// `system` is null or a handle from [`sc_system_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_system_free(system: *mut ScSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of states, and of self-loops added to make the system total.
///
/// # Safety
/// `system` is a live handle; the outputs are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_system_size(
    system: *mut ScSystem,
    states: *mut usize,
    added_loops: *mut usize,
) -> ScStatus {
    guard(|| {
        let sys = system_arg(system)?;
        *out_arg(states, "states")? = sys.system.size();
        *out_arg(added_loops, "added_loops")? = sys.added_loops;
        Ok(())
    })
}

/// Whether no state has two predecessors, and whether every edge is matched by its reverse.
///
/// # Safety
/// `system` is a live handle; the outputs are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_system_properties(
    system: *mut ScSystem,
    injective: *mut bool,
    symmetric: *mut bool,
) -> ScStatus {
    guard(|| {
        let sys = system_arg(system)?;
        *out_arg(injective, "injective")? = sys.system.is_injective();
        *out_arg(symmetric, "symmetric")? = sys.system.is_symmetric();
        Ok(())
    })
}

/// Number of state sets kept by the next-time core, enumerating subsets of
/// at most `cap` states.
///
/// # Safety
/// `system` is a live handle; `count` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_system_core_next_count(
    system: *mut ScSystem,
    cap: usize,
    count: *mut usize,
) -> ScStatus {
    guard(|| {
        let sys = system_arg(system)?;
        let kept = sys.system.core_next_states(cap).map_err(|e| match e {
            KripkeError::SubsetCap { .. } => Failure(ScStatus::Cap, e.to_string()),
            other => Failure(ScStatus::Internal, other.to_string()),
        })?;
        *out_arg(count, "count")? = kept.len();
        Ok(())
    })
}

/// Compares trace and state semantics of `formula` on the system's default
/// trace universe (built on first use and kept with the handle).
///
/// # Safety
/// `system` is a live handle; `formula` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_system_check(
    system: *mut ScSystem,
    formula: *const c_char,
    out: *mut ScCheck,
) -> ScStatus {
    guard(|| {
        let sys = system_arg(system)?;
        let out = out_arg(out, "out")?;
        let phi = parse_formula(text_arg(formula, "formula")?).map_err(parse_failure)?;
        if sys.model.is_none() {
            let model = SuiteConfig::default()
                .model("system", &sys.system)
                .map_err(|e| match e {
                    SuiteError::UniverseTooSmall { .. } => {
                        Failure(ScStatus::Universe, e.to_string())
                    }
                    other => Failure(ScStatus::Internal, other.to_string()),
                })?;
            sys.model = Some(model);
        }
        let model = sys.model.as_ref().expect("model was just built");
        let b = is_branchable(&phi, model).map_err(parse_failure)?;
        *out = ScCheck {
            alpha_mask: b.abstracted.0,
            state_mask: b.state.0,
            branchable: b.branchable(),
            deterministic: is_ltl_det(&phi),
        };
        Ok(())
    })
}

/// Parses a lattice file.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_lattice_parse(
    text: *const c_char,
    out: *mut *mut ScLattice,
) -> ScStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let file = parse_lat(text_arg(text, "text")?).map_err(parse_failure)?;
        *out = Box::into_raw(Box::new(ScLattice { file }));
        Ok(())
    })
}

/// # Safety
/// `lattice` is null or a handle from [`sc_lattice_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_lattice_free(lattice: *mut ScLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Complete shell or core of `domain` for the comma-separated `functions`.
/// `*result` receives the name of the resulting domain when the file
/// declares it, otherwise its fixpoints; free it with [`sc_string_free`].
///
/// # Safety
/// `lattice` is a live handle; the strings are NUL-terminated; `result` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sc_lattice_shellcore(
    lattice: *mut ScLattice,
    domain: *const c_char,
    functions: *const c_char,
    mode: ScMode,
    result: *mut *mut c_char,
) -> ScStatus {
    guard(|| {
        let file = &out_arg(lattice, "lattice")?.file;
        let result = out_arg(result, "result")?;
        *result = ptr::null_mut();
        let domain = text_arg(domain, "domain")?;
        let rho = file
            .domain(domain)
            .ok_or_else(|| parse_failure(format!("unknown domain `{domain}`")))?;
        let fs = text_arg(functions, "functions")?
            .split(',')
            .map(|name| {
                file.function(name.trim())
                    .cloned()
                    .ok_or_else(|| parse_failure(format!("unknown function `{name}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let fs = FnSet::new(&file.lattice, fs).map_err(parse_failure)?;
        let report = match mode {
            ScMode::Shell => complete_shell(rho, &fs),
            ScMode::Core => complete_core(rho, &fs),
        }
        .map_err(|e| Failure(ScStatus::Internal, e.to_string()))?;
        let text = file
            .domain_named(&report.result)
            .map(str::to_string)
            .unwrap_or_else(|| report.result.show());
        *result = CString::new(text)
            .map_err(|e| Failure(ScStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}
