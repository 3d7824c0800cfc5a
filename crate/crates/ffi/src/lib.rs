//! C ABI over `fhn_core`.
//!
//! Every function returns an `FhnStatus`; on failure the message is kept
//! per thread and read with `fhn_last_error`. Wave solutions are opaque
//! `FhnWave` handles released with `fhn_wave_free`; strings returned through
//! out-pointers are released with `fhn_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fhn_core::model::{classify_regime, ModelParams, WaveKind};
use fhn_core::sim::{self, Outcome, SimConfig, SimKind};
use fhn_core::wave::{self, SolveOptions, WaveSolution};
use fhn_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Inadmissible = 3,
    SolverFailure = 4,
    Io = 5,
    Panic = 6,
    BufferTooSmall = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhnWaveKind {
    Front = 0,
    ReversedFront = 1,
    Pulse = 2,
}

impl From<FhnWaveKind> for WaveKind {
    fn from(k: FhnWaveKind) -> Self {
        match k {
            FhnWaveKind::Front => WaveKind::Front,
            FhnWaveKind::ReversedFront => WaveKind::ReversedFront,
            FhnWaveKind::Pulse => WaveKind::Pulse,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhnSimKind {
    Front = 0,
    Reversed = 1,
    Pulse = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FhnOutcome {
    FrontRight = 0,
    FrontLeft = 1,
    Pulse = 2,
    Collapsed = 3,
    Undetermined = 4,
}

impl From<Outcome> for FhnOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::FrontRight => FhnOutcome::FrontRight,
            Outcome::FrontLeft => FhnOutcome::FrontLeft,
            Outcome::Pulse => FhnOutcome::Pulse,
            Outcome::Collapsed => FhnOutcome::Collapsed,
            Outcome::Undetermined => FhnOutcome::Undetermined,
        }
    }
}

/// Opaque wave solution.
pub struct FhnWave {
    inner: WaveSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> FhnStatus {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) => FhnStatus::InvalidInput,
        Error::Regime(_) | Error::Hypothesis(_) => FhnStatus::Inadmissible,
        Error::Io(_) => FhnStatus::Io,
        _ => FhnStatus::SolverFailure,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (FhnStatus, String)>) -> FhnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FhnStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            FhnStatus::Panic
        }
    }
}

fn core<T>(r: fhn_core::Result<T>) -> Result<T, (FhnStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (FhnStatus, String) {
    (FhnStatus::NullPointer, format!("{what} is null"))
}

fn params(beta: f64, gamma: f64, d: f64) -> Result<ModelParams, (FhnStatus, String)> {
    core(ModelParams::new(beta, gamma, d))
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), (FhnStatus, String)> {
    let c = CString::new(s).map_err(|e| (FhnStatus::InvalidInput, e.to_string()))?;
    // SAFETY: caller guarantees `out` is a valid pointer; checked non-null by callers.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (FhnStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    // SAFETY: non-null, caller guarantees a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(p) }.to_str().map_err(|e| (FhnStatus::InvalidInput, e.to_string()))?;
    Ok(Path::new(s))
}

fn wave_ref<'a>(w: *const FhnWave) -> Result<&'a WaveSolution, (FhnStatus, String)> {
    if w.is_null() {
        return Err(null("wave handle"));
    }
    // SAFETY: non-null handles come from `Box::into_raw` in this crate.
    Ok(unsafe { &(*w).inner })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fhn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fhn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fhn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Regime report and closed-form constants as JSON.
///
/// # Safety
/// `out` must be a valid pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn fhn_regime_json(beta: f64, gamma: f64, d: f64, out: *mut *mut c_char) -> FhnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = core(classify_regime(&params(beta, gamma, d)?))?;
        out_string(serde_json::to_string(&r).map_err(|e| (FhnStatus::SolverFailure, e.to_string()))?, out)
    })
}

/// Whether the regime at (β, γ, d) admits `kind`; writes 1 or 0.
///
/// # Safety
/// `admissible` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fhn_regime_admits(beta: f64, gamma: f64, d: f64, kind: FhnWaveKind, admissible: *mut i32) -> FhnStatus {
    guard(|| {
        if admissible.is_null() {
            return Err(null("admissible"));
        }
        let r = core(classify_regime(&params(beta, gamma, d)?))?;
        *admissible = r.admits(kind.into()) as i32;
        Ok(())
    })
}

/// Computes a wave with default options. On success `*out` owns a handle.
///
/// # Safety
/// `out` must be a valid pointer to an `FhnWave *`.
#[no_mangle]
pub unsafe extern "C" fn fhn_solve_wave(beta: f64, gamma: f64, d: f64, kind: FhnWaveKind, out: *mut *mut FhnWave) -> FhnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = core(wave::solve_wave(&params(beta, gamma, d)?, kind.into(), &SolveOptions::default()))?;
        *out = Box::into_raw(Box::new(FhnWave { inner: s }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_free(w: *mut FhnWave) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Speed c and κ = dc².
///
/// # Safety
/// `w` must be a live handle; `c` and `kappa` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_speed(w: *const FhnWave, c: *mut f64, kappa: *mut f64) -> FhnStatus {
    guard(|| {
        let s = wave_ref(w)?;
        if c.is_null() || kappa.is_null() {
            return Err(null("output"));
        }
        *c = s.report.c;
        *kappa = s.report.kappa;
        Ok(())
    })
}

/// 1 if every validation check passed, else 0.
///
/// # Safety
/// `w` must be a live handle; `accepted` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_accepted(w: *const FhnWave, accepted: *mut i32) -> FhnStatus {
    guard(|| {
        let s = wave_ref(w)?;
        if accepted.is_null() {
            return Err(null("accepted"));
        }
        *accepted = (s.report.status == wave::SolutionStatus::Accepted) as i32;
        Ok(())
    })
}

/// Number of profile nodes.
///
/// # Safety
/// `w` must be a live handle; `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_len(w: *const FhnWave, len: *mut usize) -> FhnStatus {
    guard(|| {
        let s = wave_ref(w)?;
        if len.is_null() {
            return Err(null("len"));
        }
        *len = s.u.len();
        Ok(())
    })
}

/// Copies z, u, v into caller buffers of length `cap` (at least
/// `fhn_wave_len`).
///
/// # Safety
/// `w` must be a live handle; each buffer must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_profile(w: *const FhnWave, z: *mut f64, u: *mut f64, v: *mut f64, cap: usize) -> FhnStatus {
    guard(|| {
        let s = wave_ref(w)?;
        if z.is_null() || u.is_null() || v.is_null() {
            return Err(null("buffer"));
        }
        let n = s.u.len();
        if cap < n {
            return Err((FhnStatus::BufferTooSmall, format!("need {n} entries, got {cap}")));
        }
        for i in 0..n {
            *z.add(i) = s.u.grid.z(i);
            *u.add(i) = s.u.values[i];
            *v.add(i) = s.v.values[i];
        }
        Ok(())
    })
}

/// Full report as JSON.
///
/// # Safety
/// `w` must be a live handle; `out` a valid pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_report_json(w: *const FhnWave, out: *mut *mut c_char) -> FhnStatus {
    guard(|| {
        let s = wave_ref(w)?;
        if out.is_null() {
            return Err(null("out"));
        }
        out_string(serde_json::to_string(&s.report).map_err(|e| (FhnStatus::SolverFailure, e.to_string()))?, out)
    })
}

/// Writes `wave.json` and `profile.csv` into `dir`.
///
/// # Safety
/// `w` must be a live handle; `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_save(w: *const FhnWave, dir: *const c_char) -> FhnStatus {
    guard(|| core(wave_ref(w)?.save(path_arg(dir)?)))
}

/// Loads a directory written by `fhn_wave_save`.
///
/// # Safety
/// `dir` a NUL-terminated path; `out` a valid pointer to an `FhnWave *`.
#[no_mangle]
pub unsafe extern "C" fn fhn_wave_load(dir: *const c_char, out: *mut *mut FhnWave) -> FhnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = core(WaveSolution::load(path_arg(dir)?))?;
        *out = Box::into_raw(Box::new(FhnWave { inner: s }));
        Ok(())
    })
}

/// Direct simulation from step initial data with `n` nodes and step `dtau`;
/// writes the measured rescaled speed and the outcome.
///
/// # Safety
/// `sigma` and `outcome` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fhn_simulate(
    beta: f64,
    gamma: f64,
    d: f64,
    kind: FhnSimKind,
    n: usize,
    dtau: f64,
    sigma: *mut f64,
    outcome: *mut FhnOutcome,
) -> FhnStatus {
    guard(|| {
        if sigma.is_null() || outcome.is_null() {
            return Err(null("output"));
        }
        let mut cfg = SimConfig::new(params(beta, gamma, d)?);
        cfg.n = n;
        cfg.dtau = dtau;
        let k = match kind {
            FhnSimKind::Front => SimKind::Front,
            FhnSimKind::Reversed => SimKind::Reversed,
            FhnSimKind::Pulse => SimKind::Pulse,
        };
        let (r, _) = core(sim::run_single(k, &cfg, None))?;
        *sigma = r.sigma_measured;
        *outcome = r.outcome.into();
        Ok(())
    })
}
