//! C interface to `dsmin`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns a [`DsminStatus`];
//! on failure [`dsmin_last_error`] describes the problem. Element indices in
//! this interface are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dsmin::bounds::minima_lower_bounds;
use dsmin::brute::brute_force_minimize;
use dsmin::cli::InstanceFile;
use dsmin::dsopt::{
    solve, Algorithm, Constraint, ConstraintSpec, DsInstance, OptimizationTrace,
    PermutationHeuristic, SolverOptions,
};
use dsmin::sfm::SfmSolver;
use dsmin::{Error, Subset};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsminStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Infeasible = 4,
    TooLarge = 5,
    SolverError = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsminAlgorithm {
    SubSup = 0,
    SupSub = 1,
    ModMod = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsminHeuristic {
    GGain = 0,
    VGain = 1,
    Random = 2,
}

/// Solver settings; start from [`dsmin_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DsminOptions {
    pub algorithm: DsminAlgorithm,
    pub epsilon: f64,
    pub max_iters: usize,
    pub heuristic: DsminHeuristic,
    pub seed: u64,
}

/// A pair of submodular functions.
pub struct DsminInstance {
    inner: DsInstance,
}

/// Outcome of one solver run.
pub struct DsminResult {
    trace: OptimizationTrace,
    set: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> DsminStatus {
    match err {
        Error::Parse(_) | Error::Line { .. } | Error::Json(_) => DsminStatus::ParseError,
        Error::Infeasible(_) => DsminStatus::Infeasible,
        Error::TooLarge { .. } => DsminStatus::TooLarge,
        Error::Domain(_) | Error::Io(_) => DsminStatus::InvalidArgument,
        Error::NotConverged { .. } | Error::Solver(_) => DsminStatus::SolverError,
    }
}

fn fail(err: Error) -> DsminStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `body`, converting a panic into [`DsminStatus::Panic`].
fn guard(body: impl FnOnce() -> DsminStatus) -> DsminStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| {
        set_error("internal panic");
        DsminStatus::Panic
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DsminStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(DsminStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        DsminStatus::InvalidArgument
    })
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dsmin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn dsmin_options_default() -> DsminOptions {
    let d = SolverOptions::default();
    DsminOptions {
        algorithm: DsminAlgorithm::ModMod,
        epsilon: d.epsilon,
        max_iters: d.max_iters,
        heuristic: DsminHeuristic::GGain,
        seed: d.seed,
    }
}

/// Builds an instance from JSON `{"f": <spec>, "g": <spec>}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsmin_instance_from_json(
    json: *const c_char,
    out: *mut *mut DsminInstance,
) -> DsminStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return DsminStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = tri!(read_str(json));
        let file: InstanceFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return fail(e.into()),
        };
        match file.build() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DsminInstance { inner }));
                DsminStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `inst` must be NULL or a handle from [`dsmin_instance_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsmin_instance_free(inst: *mut DsminInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Ground-set size, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_instance_size(inst: *const DsminInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

unsafe fn read_set(n: usize, elements: *const usize, len: usize) -> Result<Subset, DsminStatus> {
    if len > 0 && elements.is_null() {
        set_error("null element array");
        return Err(DsminStatus::NullPointer);
    }
    let items = if len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(elements, len)
    };
    Subset::from_indices(n, items.iter().copied()).map_err(fail)
}

/// `v(X) = f(X) - g(X)` for the 0-based elements `elements[0..len]`.
///
/// # Safety
/// `inst` must be a live handle, `elements` must point to `len` values and
/// `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dsmin_instance_value(
    inst: *const DsminInstance,
    elements: *const usize,
    len: usize,
    value: *mut f64,
) -> DsminStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), value.is_null()) else {
            set_error("null argument");
            return DsminStatus::NullPointer;
        };
        let set = tri!(read_set(inst.inner.n(), elements, len));
        *value = inst.inner.value(&set);
        DsminStatus::Ok
    })
}

fn to_options(o: &DsminOptions) -> (Algorithm, SolverOptions) {
    let algorithm = match o.algorithm {
        DsminAlgorithm::SubSup => Algorithm::SubSup,
        DsminAlgorithm::SupSub => Algorithm::SupSub,
        DsminAlgorithm::ModMod => Algorithm::ModMod,
    };
    let heuristic = match o.heuristic {
        DsminHeuristic::GGain => PermutationHeuristic::GGain,
        DsminHeuristic::VGain => PermutationHeuristic::VGain,
        DsminHeuristic::Random => PermutationHeuristic::Random,
    };
    let opts = SolverOptions {
        epsilon: o.epsilon,
        max_iters: o.max_iters,
        heuristic,
        seed: o.seed,
        ..SolverOptions::default()
    };
    (algorithm, opts)
}

/// Runs a solver. `options` may be NULL for the defaults; `constraint_json`
/// may be NULL for no constraint, otherwise it is a 1-based constraint spec
/// such as `{"kind": "cardinality_le", "k": 2}`.
///
/// # Safety
/// Pointers must be NULL where allowed or valid; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dsmin_solve(
    inst: *const DsminInstance,
    options: *const DsminOptions,
    constraint_json: *const c_char,
    out: *mut *mut DsminResult,
) -> DsminStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            set_error("null argument");
            return DsminStatus::NullPointer;
        };
        *out = ptr::null_mut();
        let (algorithm, opts) = to_options(options.as_ref().unwrap_or(&dsmin_options_default()));
        if opts.epsilon.is_nan() || opts.epsilon < 0.0 {
            set_error(format!("epsilon must be >= 0, got {}", opts.epsilon));
            return DsminStatus::InvalidArgument;
        }
        let n = inst.inner.n();
        let constraint = if constraint_json.is_null() {
            Constraint::None
        } else {
            let text = tri!(read_str(constraint_json));
            let parsed = serde_json::from_str::<ConstraintSpec>(text)
                .map_err(Error::from)
                .and_then(|spec| spec.into_constraint(n))
                .and_then(|c| c.validate(n).map(|_| c));
            match parsed {
                Ok(c) => c,
                Err(e) => return fail(e),
            }
        };
        match solve(&inst.inner, algorithm, &opts, &constraint) {
            Ok(trace) => {
                let set = trace.final_set().to_vec();
                *out = Box::into_raw(Box::new(DsminResult { trace, set }));
                DsminStatus::Ok
            }
            Err(failure) => fail(failure.error),
        }
    })
}

/// # Safety
/// `res` must be NULL or a handle from [`dsmin_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_free(res: *mut DsminResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Final objective value, or NaN for NULL.
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_value(res: *const DsminResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.trace.final_value())
}

/// Number of elements in the final set.
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_size(res: *const DsminResult) -> usize {
    res.as_ref().map_or(0, |r| r.set.len())
}

/// Copies the final set's 0-based elements, in increasing order, into `buf`.
///
/// # Safety
/// `res` must be a live handle and `buf` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_elements(
    res: *const DsminResult,
    buf: *mut usize,
    cap: usize,
) -> DsminStatus {
    guard(|| {
        let Some(res) = res.as_ref() else {
            set_error("null result");
            return DsminStatus::NullPointer;
        };
        if res.set.len() > cap {
            set_error(format!(
                "buffer holds {cap} elements, result has {}",
                res.set.len()
            ));
            return DsminStatus::BufferTooSmall;
        }
        if !res.set.is_empty() {
            if buf.is_null() {
                set_error("null buffer");
                return DsminStatus::NullPointer;
            }
            ptr::copy_nonoverlapping(res.set.as_ptr(), buf, res.set.len());
        }
        DsminStatus::Ok
    })
}

/// Accepted steps after the starting point.
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_iterations(res: *const DsminResult) -> usize {
    res.as_ref().map_or(0, |r| r.trace.accepted_steps())
}

/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_oracle_calls(res: *const DsminResult) -> u64 {
    res.as_ref().map_or(0, |r| r.trace.oracle_calls())
}

/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_locally_optimal(res: *const DsminResult) -> bool {
    res.as_ref().is_some_and(|r| r.trace.locally_optimal)
}

/// The full trace as JSON (1-based sets). Free with [`dsmin_string_free`].
///
/// # Safety
/// `res` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsmin_result_trace_json(res: *const DsminResult) -> *mut c_char {
    res.as_ref().map_or(ptr::null_mut(), |r| {
        CString::new(r.trace.to_json()).map_or(ptr::null_mut(), CString::into_raw)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dsmin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The two certified lower bounds on the minimum of `v`.
///
/// # Safety
/// `inst` must be a live handle; `bound1` and `bound2` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dsmin_certify(
    inst: *const DsminInstance,
    bound1: *mut f64,
    bound2: *mut f64,
) -> DsminStatus {
    guard(|| {
        let (Some(inst), false, false) = (inst.as_ref(), bound1.is_null(), bound2.is_null()) else {
            set_error("null argument");
            return DsminStatus::NullPointer;
        };
        match minima_lower_bounds(&inst.inner.f, &inst.inner.g, &SfmSolver::default()) {
            Ok(b) => {
                *bound1 = b.bound1;
                *bound2 = b.bound2;
                DsminStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exact minimum by enumeration (small ground sets only). The minimizer's
/// 0-based elements go to `buf` and their count to `len`.
///
/// # Safety
/// `inst` must be a live handle; `value` and `len` must be valid for writes
/// and `buf` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dsmin_brute_force_minimum(
    inst: *const DsminInstance,
    value: *mut f64,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> DsminStatus {
    guard(|| {
        let (Some(inst), false, false) = (inst.as_ref(), value.is_null(), len.is_null()) else {
            set_error("null argument");
            return DsminStatus::NullPointer;
        };
        let (set, min) = match brute_force_minimize(&inst.inner.v()) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let elems = set.to_vec();
        *value = min;
        *len = elems.len();
        if elems.len() > cap {
            set_error(format!(
                "buffer holds {cap} elements, minimizer has {}",
                elems.len()
            ));
            return DsminStatus::BufferTooSmall;
        }
        if !elems.is_empty() {
            if buf.is_null() {
                set_error("null buffer");
                return DsminStatus::NullPointer;
            }
            ptr::copy_nonoverlapping(elems.as_ptr(), buf, elems.len());
        }
        DsminStatus::Ok
    })
}
