//! C interface to rdcarleman.
//!
//! Presets and runs are opaque handles created and released through this
//! API. Every fallible call returns an `RdcStatus`; the message of the last
//! failure on the calling thread is available from `rdc_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rdcarleman::carleman::{compute_radii, Breakpoint, LambdaPolicy};
use rdcarleman::experiments::{self, Preset, RunArtifacts};
use rdcarleman::grid::{norm2, GridSpec};
use rdcarleman::rdode::RDParams;
use rdcarleman::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotDissipative = 3,
    SizeCap = 4,
    Numerical = 5,
    Io = 6,
    Config = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdcBreakpoint {
    Sharp = 0,
    Loose = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RdcRadii {
    pub r: f64,
    pub r_d: f64,
    pub r_d_sharp: f64,
    pub lambda1: f64,
    pub lambda_used: f64,
    pub c_lambda: f64,
    pub gamma: f64,
}

/// Opaque preset handle.
pub struct RdcPreset(Preset);

/// Opaque handle to a finished run.
pub struct RdcRun(RunArtifacts);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RdcStatus {
    match e {
        Error::InvalidArgument(_) | Error::UndefinedRatio | Error::GammaUndefined => RdcStatus::InvalidArgument,
        Error::NotDissipative(_) => RdcStatus::NotDissipative,
        Error::SizeCap { .. } | Error::Overflow(_) => RdcStatus::SizeCap,
        Error::Stiffness(_) | Error::Instability(_) | Error::InvalidStepBound(_) => RdcStatus::Numerical,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => RdcStatus::Io,
        Error::Config(_) | Error::Toml(_) => RdcStatus::Config,
        Error::Preset { source, .. } => status_of(source),
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RdcStatus, String)>) -> RdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdcStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside rdcarleman".into());
            RdcStatus::Panic
        }
    }
}

fn lift<T>(r: rdcarleman::Result<T>) -> Result<T, (RdcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RdcStatus, String) {
    (RdcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RdcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RdcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, 0 if
/// there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rdc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(m) => {
            let bytes = m.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads a built-in preset by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_preset_load(name: *const c_char, out: *mut *mut RdcPreset) -> RdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let p = lift(Preset::builtin(name))?;
        *out = Box::into_raw(Box::new(RdcPreset(p)));
        Ok(())
    })
}

/// Parses a preset from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_preset_parse(toml: *const c_char, out: *mut *mut RdcPreset) -> RdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = str_arg(toml, "toml")?;
        let p = lift(Preset::parse(src))?;
        *out = Box::into_raw(Box::new(RdcPreset(p)));
        Ok(())
    })
}

/// Applies one `key=value` override in place (e.g. `rd.D=0.2`).
///
/// # Safety
/// `preset` must come from `rdc_preset_load`/`rdc_preset_parse`.
#[no_mangle]
pub unsafe extern "C" fn rdc_preset_set(preset: *mut RdcPreset, kv: *const c_char) -> RdcStatus {
    guard(|| {
        let p = preset.as_mut().ok_or_else(|| null("preset"))?;
        let kv = str_arg(kv, "kv")?;
        p.0 = lift(p.0.with_overrides(&[kv.to_string()]))?;
        Ok(())
    })
}

/// # Safety
/// `preset` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rdc_preset_free(preset: *mut RdcPreset) {
    if !preset.is_null() {
        drop(Box::from_raw(preset));
    }
}

/// Runs a preset. With a non-null `out_dir` the artifacts are written
/// there as well.
///
/// # Safety
/// `preset` must be a live handle, `out_dir` null or a NUL-terminated path,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_run(preset: *const RdcPreset, out_dir: *const c_char, out: *mut *mut RdcRun) -> RdcStatus {
    guard(|| {
        let p = preset.as_ref().ok_or_else(|| null("preset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let art = if out_dir.is_null() {
            lift(experiments::compute_preset(&p.0))?
        } else {
            let dir = str_arg(out_dir, "out_dir")?;
            lift(experiments::run_preset(&p.0, Path::new(dir)))?
        };
        *out = Box::into_raw(Box::new(RdcRun(art)));
        Ok(())
    })
}

/// Number of truncation orders in a run.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdc_run_len(run: *const RdcRun) -> usize {
    run.as_ref().map(|r| r.0.runs.len()).unwrap_or(0)
}

/// Truncation order and max_t ||η1||_inf of entry `i`.
///
/// # Safety
/// `run` must be a live handle; `n_trunc` and `max_err` writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_run_max_error(run: *const RdcRun, i: usize, n_trunc: *mut usize, max_err: *mut f64) -> RdcStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        if n_trunc.is_null() || max_err.is_null() {
            return Err(null("output"));
        }
        let c = r
            .0
            .runs
            .get(i)
            .ok_or_else(|| (RdcStatus::OutOfRange, format!("index {i} >= {}", r.0.runs.len())))?;
        *n_trunc = c.n_trunc;
        *max_err = c.report.max_eta_inf();
        Ok(())
    })
}

fn radii_of(c: &rdcarleman::carleman::ConvergenceRadii) -> RdcRadii {
    RdcRadii {
        r: c.r,
        r_d: c.r_d,
        r_d_sharp: c.r_d_sharp,
        lambda1: c.lambda1,
        lambda_used: c.lambda_used,
        c_lambda: c.c_lambda,
        gamma: c.gamma,
    }
}

/// Radii of a run; `RDC_STATUS_NOT_DISSIPATIVE` when λ1 >= 0.
///
/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_run_radii(run: *const RdcRun, out: *mut RdcRadii) -> RdcStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        match (&r.0.radii, &r.0.radii_error) {
            (Some(c), _) => {
                *o = radii_of(c);
                Ok(())
            }
            (None, e) => Err((RdcStatus::NotDissipative, e.clone().unwrap_or_default())),
        }
    })
}

/// 1 if every bound check of the run passed, 0 otherwise (or for null).
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdc_run_checks_ok(run: *const RdcRun) -> i32 {
    run.as_ref().map(|r| r.0.checks.all_ok() as i32).unwrap_or(0)
}

/// # Safety
/// `run` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rdc_run_free(run: *mut RdcRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// R and R_D for U' = (D Δ_h + a) U + b U^M on an all-Dirichlet grid,
/// with λ = λ1 / `lambda_ratio` (or optimized when `lambda_ratio` <= 0).
/// `u_in` holds the n^d initial values.
///
/// # Safety
/// `u_in` must point to `len` doubles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn rdc_compute_radii(
    diff: f64,
    a: f64,
    b: f64,
    m: usize,
    n: usize,
    d: usize,
    u_in: *const f64,
    len: usize,
    lambda_ratio: f64,
    breakpoint: RdcBreakpoint,
    out: *mut RdcRadii,
) -> RdcStatus {
    guard(|| {
        if u_in.is_null() {
            return Err(null("u_in"));
        }
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        let p = lift(RDParams::new(diff, a, b, m))?;
        let g = lift(GridSpec::dirichlet(n, d))?;
        if len != g.size() {
            return Err((RdcStatus::InvalidArgument, format!("u_in has {len} values, grid has {}", g.size())));
        }
        let u = std::slice::from_raw_parts(u_in, len);
        let policy = if lambda_ratio > 0.0 {
            LambdaPolicy::Ratio(lambda_ratio)
        } else {
            LambdaPolicy::Optimize
        };
        let bp = match breakpoint {
            RdcBreakpoint::Sharp => Breakpoint::Sharp,
            RdcBreakpoint::Loose => Breakpoint::Loose,
        };
        *o = radii_of(&lift(compute_radii(&p, &g, norm2(u), None, policy, bp))?);
        Ok(())
    })
}

/// Runs the bound audit for `scope` ("all" or a module name) and stores
/// the number of failed checks in `failures`.
///
/// # Safety
/// `scope` must be a NUL-terminated string; `failures` writable.
#[no_mangle]
pub unsafe extern "C" fn rdc_audit(scope: *const c_char, failures: *mut usize) -> RdcStatus {
    guard(|| {
        let s = str_arg(scope, "scope")?;
        let f = failures.as_mut().ok_or_else(|| null("failures"))?;
        let reps = lift(experiments::audit_bounds(s))?;
        *f = reps.iter().map(|r| r.failures().len()).sum();
        Ok(())
    })
}
