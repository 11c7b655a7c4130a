//! C ABI over `dirac_pollution`.
//!
//! Objects are opaque handles created by `dp_*_new`/`dp_*_run` and released
//! with the matching `dp_*_free`. Every fallible call returns a [`DpStatus`];
//! the message of the last failure on the calling thread is available from
//! [`dp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dirac_pollution::analysis::SweepTrace;
use dirac_pollution::config::RunConfig;
use dirac_pollution::exact::exact_levels;
use dirac_pollution::model::PhysicalParams;
use dirac_pollution::run::{run_spectrum, run_sweep, SpectrumRun};
use dirac_pollution::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Parameter = 4,
    Numerical = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Run configuration.
pub struct DpConfig(RunConfig);

/// Result of a single pencil solve.
pub struct DpSpectrum(SpectrumRun);

/// Classified parameter sweep.
pub struct DpSweep(SweepTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DpStatus {
    match e {
        Error::Config { .. } => DpStatus::Config,
        Error::Parameter { .. } | Error::UnknownBasis(_) => DpStatus::Parameter,
        Error::Io(_) => DpStatus::Io,
        _ => DpStatus::Numerical,
    }
}

fn fail(status: DpStatus, msg: impl Into<String>) -> DpStatus {
    set_error(msg.into());
    status
}

/// Run `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), DpStatus>) -> DpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DpStatus::Panic, "internal panic"),
    }
}

fn lib(e: Error) -> DpStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, DpStatus> {
    if p.is_null() {
        return Err(fail(DpStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(DpStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, DpStatus> {
    p.as_ref().ok_or_else(|| fail(DpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, DpStatus> {
    p.as_mut().ok_or_else(|| fail(DpStatus::NullPointer, format!("{name} is null")))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default configuration.
#[no_mangle]
pub extern "C" fn dp_config_new() -> *mut DpConfig {
    Box::into_raw(Box::new(DpConfig(RunConfig::default())))
}

/// Parse configuration text (`key = value` lines).
///
/// # Safety
/// `text` must be a nul-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dp_config_parse(text: *const c_char, out_cfg: *mut *mut DpConfig) -> DpStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let slot = out(out_cfg, "out")?;
        let cfg = RunConfig::parse(text).map_err(lib)?;
        *slot = Box::into_raw(Box::new(DpConfig(cfg)));
        Ok(())
    })
}

/// Set one dotted key.
///
/// # Safety
/// `cfg` must come from this library; `key` and `value` must be
/// nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn dp_config_set(cfg: *mut DpConfig, key: *const c_char, value: *const c_char) -> DpStatus {
    guard(|| {
        let cfg = out(cfg, "cfg")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        cfg.0.set(key, value).map_err(lib)
    })
}

/// # Safety
/// `cfg` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_config_free(cfg: *mut DpConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Energy of level `n` (n ≥ 1) of the point-Coulomb problem.
///
/// # Safety
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dp_exact_level(alpha: f64, z: f64, n: u32, out_value: *mut f64) -> DpStatus {
    guard(|| {
        let slot = out(out_value, "out")?;
        if n == 0 {
            return Err(fail(DpStatus::OutOfRange, "levels start at n = 1"));
        }
        let p = PhysicalParams::new(alpha, z).map_err(lib)?;
        let levels = exact_levels(&p, n).map_err(lib)?;
        *slot = levels.levels[n as usize - 1].1;
        Ok(())
    })
}

/// Solve the configured pencil.
///
/// # Safety
/// `cfg` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_run(cfg: *const DpConfig, out_spec: *mut *mut DpSpectrum) -> DpStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let slot = out(out_spec, "out")?;
        let run = run_spectrum(&cfg.0).map_err(lib)?;
        *slot = Box::into_raw(Box::new(DpSpectrum(run)));
        Ok(())
    })
}

/// Number of eigenvalues (retained overlap directions).
///
/// # Safety
/// `spec` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_len(spec: *const DpSpectrum) -> usize {
    spec.as_ref().map_or(0, |s| s.0.result.eigenvalues.len())
}

/// Copy up to `cap` ascending eigenvalues into `buf`; returns the count
/// written.
///
/// # Safety
/// `spec` must come from this library; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_eigenvalues(spec: *const DpSpectrum, buf: *mut f64, cap: usize) -> usize {
    let (Some(s), false) = (spec.as_ref(), buf.is_null()) else {
        return 0;
    };
    let v = &s.0.result.eigenvalues;
    let n = v.len().min(cap);
    ptr::copy_nonoverlapping(v.as_ptr(), buf, n);
    n
}

/// Number of eigenvalues inside the gap.
///
/// # Safety
/// `spec` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_gap_len(spec: *const DpSpectrum) -> usize {
    spec.as_ref().map_or(0, |s| s.0.gap.len())
}

/// Gap eigenvalue `i` and its distance to the nearest reference level.
///
/// # Safety
/// `spec` must come from this library; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_gap(
    spec: *const DpSpectrum,
    i: usize,
    out_value: *mut f64,
    out_distance: *mut f64,
) -> DpStatus {
    guard(|| {
        let s = handle(spec, "spec")?;
        let g = s.0.gap.get(i).ok_or_else(|| fail(DpStatus::OutOfRange, format!("gap index {i}")))?;
        if let Some(v) = out_value.as_mut() {
            *v = g.value;
        }
        if let Some(d) = out_distance.as_mut() {
            *d = g.oracle_distance;
        }
        Ok(())
    })
}

/// # Safety
/// `spec` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_spectrum_free(spec: *mut DpSpectrum) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Run and classify the configured sweep.
///
/// # Safety
/// `cfg` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_run(cfg: *const DpConfig, out_sweep: *mut *mut DpSweep) -> DpStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let slot = out(out_sweep, "out")?;
        let trace = run_sweep(&cfg.0).map_err(lib)?;
        *slot = Box::into_raw(Box::new(DpSweep(trace)));
        Ok(())
    })
}

/// # Safety
/// `sweep` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_steps(sweep: *const DpSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.grid.len())
}

/// # Safety
/// `sweep` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_trajectories(sweep: *const DpSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.trajectories.len())
}

/// Value of trajectory `traj` at grid point `step`; NaN where absent.
///
/// # Safety
/// `sweep` must come from this library; `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_value(sweep: *const DpSweep, traj: usize, step: usize, out_value: *mut f64) -> DpStatus {
    guard(|| {
        let s = handle(sweep, "sweep")?;
        let slot = out(out_value, "out")?;
        *slot = *s
            .0
            .trajectories
            .get(traj)
            .and_then(|t| t.values.get(step))
            .ok_or_else(|| fail(DpStatus::OutOfRange, format!("trajectory {traj}, step {step}")))?;
        Ok(())
    })
}

/// 1 if trajectory `traj` is flagged spurious, 0 if not, −1 if out of range.
///
/// # Safety
/// `sweep` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_is_spurious(sweep: *const DpSweep, traj: usize) -> i32 {
    match sweep.as_ref().and_then(|s| s.0.trajectories.get(traj)) {
        Some(t) => i32::from(t.is_spurious()),
        None => -1,
    }
}

/// CSV rendering; release with [`dp_string_free`].
///
/// # Safety
/// `sweep` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_csv(sweep: *const DpSweep) -> *mut c_char {
    match sweep.as_ref() {
        Some(s) => CString::new(s.0.to_csv()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `sweep` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_sweep_free(sweep: *mut DpSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// # Safety
/// `s` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
