//! C ABI for screenlab.
//!
//! Every fallible function returns a [`ScreenlabStatus`]. On failure a message
//! is kept per thread and can be read with [`screenlab_last_error_message`].
//! Handles and strings returned through out-pointers are owned by the caller
//! and must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use screenlab::config::ConfigLayer;
use screenlab::output::to_csv;
use screenlab::{
    cascade_search, examination_search, AggregateResult, CandidatePool, Error, FatigueKind, FatigueModel,
    ProblemParams, RngStream, ScreeningOrder, SweepConfig,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    Infeasible = 4,
    RuntimeError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenlabProblem {
    /// Score everyone, keep the best quota-respecting set.
    Best = 0,
    /// Stop at the first k good-enough candidates.
    Good = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenlabFatigue {
    None = 0,
    Eps1 = 1,
    Eps2 = 2,
}

/// Experiment configuration.
pub struct ScreenlabConfig {
    inner: SweepConfig,
}

/// Aggregates of a finished sweep.
pub struct ScreenlabResult {
    inner: AggregateResult,
}

/// One sweep point. Missing values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenlabRow {
    pub sweep_value: f64,
    pub runs_total: u64,
    pub runs_feasible: u64,
    pub mean_rtb: f64,
    pub sd_rtb: f64,
    pub mean_jds: f64,
    pub sd_jds: f64,
    pub mean_frac_protected: f64,
    pub mean_evaluated_count: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(ScreenlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => ScreenlabStatus::ConfigError,
            Error::InfeasibleSelection => ScreenlabStatus::Infeasible,
            Error::InvalidParameter(_) | Error::UnknownCandidate(_) | Error::UndefinedCorrelation(_) => {
                ScreenlabStatus::InvalidArgument
            }
            _ => ScreenlabStatus::RuntimeError,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ScreenlabStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ScreenlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            clear_error();
            ScreenlabStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScreenlabStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(ScreenlabStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn screenlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn screenlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_config_default(out: *mut *mut ScreenlabConfig) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(ScreenlabConfig { inner: SweepConfig::default() }));
        Ok(())
    })
}

/// Parses a flat JSON config (the CLI config file format) over the defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_config_from_json(
    json: *const c_char,
    out: *mut *mut ScreenlabConfig,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let json = str_arg(json, "json")?;
        let (inner, _warnings) = ConfigLayer::from_json(json)?.resolve(&SweepConfig::default())?;
        *out = Box::into_raw(Box::new(ScreenlabConfig { inner }));
        Ok(())
    })
}

/// Normalized JSON of `config`; free with [`screenlab_string_free`].
///
/// # Safety
/// `config` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_config_to_json(
    config: *const ScreenlabConfig,
    out: *mut *mut c_char,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        *out = into_c_string(ConfigLayer::from_config(&config.inner).to_json());
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn screenlab_config_free(config: *mut ScreenlabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs every sweep point on `threads` workers (0 = all cores). The result
/// does not depend on `threads`.
///
/// # Safety
/// `config` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_run_sweep(
    config: *const ScreenlabConfig,
    threads: usize,
    out: *mut *mut ScreenlabResult,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        let inner = screenlab::run_sweep_with_threads(&config.inner, threads)?;
        *out = Box::into_raw(Box::new(ScreenlabResult { inner }));
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_result_row_count(
    result: *const ScreenlabResult,
    out: *mut usize,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = result.as_ref().ok_or_else(|| null("result"))?.inner.cells.len();
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_result_row(
    result: *const ScreenlabResult,
    index: usize,
    out: *mut ScreenlabRow,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cells = &result.as_ref().ok_or_else(|| null("result"))?.inner.cells;
        let cell = cells
            .get(index)
            .ok_or_else(|| Failure(ScreenlabStatus::InvalidArgument, format!("row {index} of {}", cells.len())))?;
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *out = ScreenlabRow {
            sweep_value: nan(cell.sweep_value),
            runs_total: cell.runs_total as u64,
            runs_feasible: cell.runs_feasible as u64,
            mean_rtb: nan(cell.rtb.mean),
            sd_rtb: nan(cell.rtb.sd),
            mean_jds: nan(cell.jds.mean),
            sd_jds: nan(cell.jds.sd),
            mean_frac_protected: nan(cell.mean_frac_protected),
            mean_evaluated_count: nan(cell.mean_evaluated_count),
        };
        Ok(())
    })
}

/// CSV text identical to the CLI output; free with [`screenlab_string_free`].
///
/// # Safety
/// `result` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenlab_result_to_csv(
    result: *const ScreenlabResult,
    out: *mut *mut c_char,
) -> ScreenlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let result = result.as_ref().ok_or_else(|| null("result"))?;
        *out = into_c_string(to_csv(std::slice::from_ref(&result.inner)));
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn screenlab_result_free(result: *mut ScreenlabResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must be a string returned by this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn screenlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves one instance. `is_protected` holds 0/1 flags and `order` lists
/// candidate indices by screening position. Writes the selected indices in
/// ascending order to `out_ids` (capacity `k`) and the number of scored
/// candidates to `out_evaluated`. Fatigue draws come from `seed`. Returns
/// `SCREENLAB_STATUS_INFEASIBLE` when k slots cannot be filled; the outputs
/// then hold the partial selection.
///
/// # Safety
/// Input arrays must hold `n` elements, `out_ids` must hold `k`, and the
/// remaining pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn screenlab_select(
    scores: *const f64,
    is_protected: *const u8,
    order: *const u32,
    n: usize,
    k: usize,
    q: f64,
    psi: f64,
    problem: ScreenlabProblem,
    fatigue: ScreenlabFatigue,
    seed: u64,
    out_ids: *mut u32,
    out_len: *mut usize,
    out_evaluated: *mut usize,
) -> ScreenlabStatus {
    guard(|| {
        let scores = slice_arg(scores, n, "scores")?;
        let flags = slice_arg(is_protected, n, "is_protected")?;
        let order = slice_arg(order, n, "order")?;
        if out_ids.is_null() {
            return Err(null("out_ids"));
        }
        let out_len = out_arg(out_len, "out_len")?;
        let out_evaluated = out_arg(out_evaluated, "out_evaluated")?;

        let flags: Vec<bool> = flags.iter().map(|&f| f != 0).collect();
        let pool = CandidatePool::new(scores, &flags)?;
        let order = ScreeningOrder::new(order.iter().copied().map(screenlab::CandidateId).collect())?;
        let params = ProblemParams::new(k, q, psi)?;
        let model = FatigueModel::from_kind(match fatigue {
            ScreenlabFatigue::None => FatigueKind::None,
            ScreenlabFatigue::Eps1 => FatigueKind::Eps1,
            ScreenlabFatigue::Eps2 => FatigueKind::Eps2,
        });
        let mut rng = RngStream::new(seed, 0);
        let outcome = match problem {
            ScreenlabProblem::Best => examination_search(&pool, &order, &params, &model, &mut rng)?,
            ScreenlabProblem::Good => cascade_search(&pool, &order, &params, &model, &mut rng)?,
        };
        let ids = outcome.selection.ids();
        let dest = std::slice::from_raw_parts_mut(out_ids, k);
        for (slot, id) in dest.iter_mut().zip(&ids) {
            *slot = id.0;
        }
        *out_len = ids.len();
        *out_evaluated = outcome.selection.evaluated_count;
        if !outcome.selection.feasible {
            return Err(Failure(ScreenlabStatus::Infeasible, "selection is infeasible".into()));
        }
        Ok(())
    })
}
