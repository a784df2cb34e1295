//! C ABI for the maoeda optimizer.
//!
//! Conventions:
//! - Opaque handles (`MaoedaPlan`, `MaoedaOutcome`) created and freed here.
//! - Every fallible function returns a `MAOEDA_*` status code; 0 is success.
//! - On failure, a thread-local message is readable via
//!   [`maoeda_last_error`].
//! - The C header lives at `include/maoeda.h` and is kept in sync by the
//!   `header_matches_exports` test and a compile smoke test.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr};
use std::path::PathBuf;

use maoeda::harness::{run_experiment, write_outputs, ExperimentOutcome, ExperimentPlan, Mode};
use maoeda::problems::ProblemId;

pub const MAOEDA_OK: c_int = 0;
pub const MAOEDA_ERR_NULL_POINTER: c_int = 1;
pub const MAOEDA_ERR_INVALID_UTF8: c_int = 2;
pub const MAOEDA_ERR_INVALID_ARGUMENT: c_int = 3;
pub const MAOEDA_ERR_RUN_FAILED: c_int = 4;
pub const MAOEDA_ERR_NO_VALUE: c_int = 5;
pub const MAOEDA_ERR_INDEX: c_int = 6;
pub const MAOEDA_ERR_IO: c_int = 7;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(code: c_int, msg: impl Into<String>) -> c_int {
    set_error(msg);
    code
}

/// Opaque experiment-plan handle.
pub struct MaoedaPlan {
    plan: ExperimentPlan,
}

/// Opaque result handle for a completed experiment.
pub struct MaoedaOutcome {
    outcome: ExperimentOutcome,
}

/// Copies the last error message for the calling thread into `buf`
/// (NUL-terminated, truncated to `cap`). Returns the full message length.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null (then only
/// the length is returned).
#[no_mangle]
pub unsafe extern "C" fn maoeda_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Creates a plan for one problem/objective-count cell with default
/// parameters (T=25, alpha=beta=0.96, gamma=0.5, 30 runs, canonical budget).
///
/// # Safety
/// `problem` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_new(
    problem: *const c_char,
    objectives: usize,
    out: *mut *mut MaoedaPlan,
) -> c_int {
    if problem.is_null() || out.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null pointer argument");
    }
    let name = match unsafe { CStr::from_ptr(problem) }.to_str() {
        Ok(s) => s,
        Err(_) => return fail(MAOEDA_ERR_INVALID_UTF8, "problem name is not valid utf-8"),
    };
    let id = match ProblemId::parse(name) {
        Ok(id) => id,
        Err(e) => return fail(MAOEDA_ERR_INVALID_ARGUMENT, e.to_string()),
    };
    let plan = ExperimentPlan::new(vec![id], vec![objectives]);
    unsafe {
        *out = Box::into_raw(Box::new(MaoedaPlan { plan }));
    }
    MAOEDA_OK
}

/// # Safety
/// `plan` must come from [`maoeda_plan_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_free(plan: *mut MaoedaPlan) {
    if !plan.is_null() {
        drop(unsafe { Box::from_raw(plan) });
    }
}

unsafe fn with_plan<F: FnOnce(&mut ExperimentPlan) -> c_int>(plan: *mut MaoedaPlan, f: F) -> c_int {
    match unsafe { plan.as_mut() } {
        Some(p) => f(&mut p.plan),
        None => fail(MAOEDA_ERR_NULL_POINTER, "null plan handle"),
    }
}

/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_runs(plan: *mut MaoedaPlan, runs: usize) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            if runs == 0 {
                return fail(MAOEDA_ERR_INVALID_ARGUMENT, "runs must be >= 1");
            }
            p.runs = runs;
            MAOEDA_OK
        })
    }
}

/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_seed(plan: *mut MaoedaPlan, seed: u64) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            p.base_seed = seed;
            MAOEDA_OK
        })
    }
}

/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_neighbor_size(plan: *mut MaoedaPlan, t: usize) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            if t < 2 {
                return fail(MAOEDA_ERR_INVALID_ARGUMENT, "neighbor size must be >= 2");
            }
            p.neighbor_size = t;
            MAOEDA_OK
        })
    }
}

/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_thresholds(
    plan: *mut MaoedaPlan,
    alpha: c_double,
    beta: c_double,
    gamma: c_double,
) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            if !(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0 && gamma >= 0.0) {
                return fail(
                    MAOEDA_ERR_INVALID_ARGUMENT,
                    "need alpha, beta in (0,1] and gamma >= 0",
                );
            }
            p.alpha = alpha;
            p.beta = beta;
            p.gamma = gamma;
            MAOEDA_OK
        })
    }
}

/// Overrides the total evaluation budget (0 restores the canonical table).
///
/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_budget_total(plan: *mut MaoedaPlan, total: usize) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            p.budget_total = if total == 0 { None } else { Some(total) };
            MAOEDA_OK
        })
    }
}

/// Caps the generation count (0 removes the cap).
///
/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_generation_cap(plan: *mut MaoedaPlan, cap: usize) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            p.t_max = if cap == 0 { None } else { Some(cap) };
            MAOEDA_OK
        })
    }
}

/// Mode: 0 standard, 1 no diversity repair, 2 no dimension reduction.
///
/// # Safety
/// `plan` must be a live plan handle.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_set_mode(plan: *mut MaoedaPlan, mode: c_int) -> c_int {
    unsafe {
        with_plan(plan, |p| {
            p.mode = match mode {
                0 => Mode::Standard,
                1 => Mode::AblateRepair,
                2 => Mode::AblateReduction,
                _ => return fail(MAOEDA_ERR_INVALID_ARGUMENT, "mode must be 0, 1 or 2"),
            };
            MAOEDA_OK
        })
    }
}

/// Executes the plan. On success `*out` owns the results.
///
/// # Safety
/// `plan` must be a live plan handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maoeda_plan_execute(
    plan: *const MaoedaPlan,
    out: *mut *mut MaoedaOutcome,
) -> c_int {
    if out.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null outcome pointer");
    }
    let plan = match unsafe { plan.as_ref() } {
        Some(p) => &p.plan,
        None => return fail(MAOEDA_ERR_NULL_POINTER, "null plan handle"),
    };
    match run_experiment(plan) {
        Ok(outcome) => {
            if let Some((p, m, seed, msg)) = outcome.failures.first() {
                return fail(
                    MAOEDA_ERR_RUN_FAILED,
                    format!("{p} M={m} seed={seed}: {msg}"),
                );
            }
            unsafe {
                *out = Box::into_raw(Box::new(MaoedaOutcome { outcome }));
            }
            MAOEDA_OK
        }
        Err(e) => fail(MAOEDA_ERR_RUN_FAILED, e.to_string()),
    }
}

/// # Safety
/// `outcome` must come from [`maoeda_plan_execute`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_free(outcome: *mut MaoedaOutcome) {
    if !outcome.is_null() {
        drop(unsafe { Box::from_raw(outcome) });
    }
}

/// Number of completed runs.
///
/// # Safety
/// `outcome` must be a live outcome handle (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_runs(outcome: *const MaoedaOutcome) -> usize {
    unsafe { outcome.as_ref() }.map_or(0, |o| o.outcome.records.len())
}

/// Hypervolume of run `index`.
///
/// # Safety
/// `outcome` must be a live outcome handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_hv(
    outcome: *const MaoedaOutcome,
    index: usize,
    out: *mut c_double,
) -> c_int {
    let Some(o) = (unsafe { outcome.as_ref() }) else {
        return fail(MAOEDA_ERR_NULL_POINTER, "null outcome handle");
    };
    if out.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null value pointer");
    }
    match o.outcome.records.get(index) {
        Some(r) => {
            unsafe { *out = r.hv };
            MAOEDA_OK
        }
        None => fail(MAOEDA_ERR_INDEX, format!("run index {index} out of range")),
    }
}

/// IGD of run `index`; `MAOEDA_ERR_NO_VALUE` when the problem has no
/// analytic front.
///
/// # Safety
/// `outcome` must be a live outcome handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_igd(
    outcome: *const MaoedaOutcome,
    index: usize,
    out: *mut c_double,
) -> c_int {
    let Some(o) = (unsafe { outcome.as_ref() }) else {
        return fail(MAOEDA_ERR_NULL_POINTER, "null outcome handle");
    };
    if out.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null value pointer");
    }
    match o.outcome.records.get(index) {
        Some(r) => match r.igd {
            Some(v) => {
                unsafe { *out = v };
                MAOEDA_OK
            }
            None => fail(MAOEDA_ERR_NO_VALUE, "no analytic front for this problem"),
        },
        None => fail(MAOEDA_ERR_INDEX, format!("run index {index} out of range")),
    }
}

/// Median hypervolume over all runs.
///
/// # Safety
/// `outcome` must be a live outcome handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_hv_median(
    outcome: *const MaoedaOutcome,
    out: *mut c_double,
) -> c_int {
    let Some(o) = (unsafe { outcome.as_ref() }) else {
        return fail(MAOEDA_ERR_NULL_POINTER, "null outcome handle");
    };
    if out.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null value pointer");
    }
    match o.outcome.summaries.first() {
        Some(s) => {
            unsafe { *out = s.hv_median };
            MAOEDA_OK
        }
        None => fail(MAOEDA_ERR_NO_VALUE, "outcome has no summary"),
    }
}

/// Writes results.csv, summary.csv, and results.json under `dir`.
///
/// # Safety
/// `outcome` must be a live outcome handle; `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn maoeda_outcome_write(
    outcome: *const MaoedaOutcome,
    dir: *const c_char,
) -> c_int {
    let Some(o) = (unsafe { outcome.as_ref() }) else {
        return fail(MAOEDA_ERR_NULL_POINTER, "null outcome handle");
    };
    if dir.is_null() {
        return fail(MAOEDA_ERR_NULL_POINTER, "null directory");
    }
    let dir = match unsafe { CStr::from_ptr(dir) }.to_str() {
        Ok(s) => PathBuf::from(s),
        Err(_) => return fail(MAOEDA_ERR_INVALID_UTF8, "directory is not valid utf-8"),
    };
    match write_outputs(&dir, &o.outcome) {
        Ok(()) => MAOEDA_OK,
        Err(e) => fail(MAOEDA_ERR_IO, e.to_string()),
    }
}
