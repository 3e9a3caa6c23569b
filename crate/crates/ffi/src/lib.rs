//! C interface to `cosfit`.
//!
//! Signals live behind an opaque `CosfitSignal` handle created by
//! `cosfit_signal_new` or `cosfit_signal_synth` and released with
//! `cosfit_signal_free`. Every fallible call returns a `CosfitStatus`; on
//! failure `cosfit_last_error_message` describes the most recent error on the
//! calling thread. Panics never cross the boundary and surface as
//! `COSFIT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cosfit::lmfit::{lm_fit, LmConfig};
use cosfit::synth::{generate, SynthConfig};
use cosfit::{fipeft, lombscargle, Error, ModelParams, SampledSignal};

/// Result codes of all fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosfitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DegenerateSpan = 3,
    Domain = 4,
    InvalidConfig = 5,
    NonFiniteCost = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Parameters of `y = a1 + a2·cos(a3·x + a4)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosfitParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl From<ModelParams> for CosfitParams {
    fn from(p: ModelParams) -> Self {
        Self {
            a1: p.a1,
            a2: p.a2,
            a3: p.a3,
            a4: p.a4,
        }
    }
}

impl From<CosfitParams> for ModelParams {
    fn from(p: CosfitParams) -> Self {
        ModelParams::new(p.a1, p.a2, p.a3, p.a4)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosfitFitResult {
    pub params: CosfitParams,
    pub chi2: f64,
    pub iterations: u32,
    /// Non-zero when the step-size criterion ended the run.
    pub converged: u8,
}

/// Opaque signal handle.
pub struct CosfitSignal {
    inner: SampledSignal,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> CosfitStatus {
    match err {
        Error::InvalidInput(_) => CosfitStatus::InvalidInput,
        Error::DegenerateSpan => CosfitStatus::DegenerateSpan,
        Error::Domain(_) => CosfitStatus::Domain,
        Error::InvalidConfig(_) => CosfitStatus::InvalidConfig,
        Error::NonFiniteCost => CosfitStatus::NonFiniteCost,
        Error::Io(_) => CosfitStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    Buffer(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CosfitStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CosfitStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed as {name}"));
            CosfitStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Buffer(needed))) => {
            set_last_error(format!("buffer too small, {needed} elements required"));
            CosfitStatus::BufferTooSmall
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CosfitStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn as_mut<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cosfit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cosfit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a signal from `n` pairs. Rows are sorted by `x`.
///
/// # Safety
/// `x` and `y` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_signal_new(
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut *mut CosfitSignal,
) -> CosfitStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        if n > 0 && (x.is_null() || y.is_null()) {
            return Err(Failure::Null("x or y"));
        }
        let (xs, ys) = if n == 0 {
            (&[][..], &[][..])
        } else {
            (
                std::slice::from_raw_parts(x, n),
                std::slice::from_raw_parts(y, n),
            )
        };
        let pairs = xs.iter().copied().zip(ys.iter().copied()).collect();
        let inner = SampledSignal::from_unsorted(pairs)?;
        *out = Box::into_raw(Box::new(CosfitSignal { inner }));
        Ok(())
    })
}

/// Generates a jittered noisy cosine signal. `jitter` is the fraction of the
/// mean spacing, in `[0, 0.5)`.
///
/// # Safety
/// `truth` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_signal_synth(
    truth: *const CosfitParams,
    periods: f64,
    fs: f64,
    sigma: f64,
    jitter: f64,
    seed: u64,
    out: *mut *mut CosfitSignal,
) -> CosfitStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = ptr::null_mut();
        let truth = *as_ref(truth, "truth")?;
        let cfg = SynthConfig::new(truth.into(), periods, fs)
            .with_sigma(sigma)
            .with_jitter(jitter)
            .with_seed(seed);
        let inner = generate(&cfg)?;
        *out = Box::into_raw(Box::new(CosfitSignal { inner }));
        Ok(())
    })
}

/// Releases a signal. NULL is ignored.
///
/// # Safety
/// `signal` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cosfit_signal_free(signal: *mut CosfitSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `signal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cosfit_signal_len(signal: *const CosfitSignal) -> usize {
    signal.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies the samples into caller buffers of capacity `cap`.
///
/// # Safety
/// `x_out` and `y_out` must be writable for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn cosfit_signal_copy(
    signal: *const CosfitSignal,
    x_out: *mut f64,
    y_out: *mut f64,
    cap: usize,
) -> CosfitStatus {
    guard(|| {
        let s = &as_ref(signal, "signal")?.inner;
        if x_out.is_null() || y_out.is_null() {
            return Err(Failure::Null("x_out or y_out"));
        }
        if cap < s.len() {
            return Err(Failure::Buffer(s.len()));
        }
        ptr::copy_nonoverlapping(s.x().as_ptr(), x_out, s.len());
        ptr::copy_nonoverlapping(s.y().as_ptr(), y_out, s.len());
        Ok(())
    })
}

/// Crossing-based initial parameter estimate.
///
/// # Safety
/// `signal` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_estimate(
    signal: *const CosfitSignal,
    out: *mut CosfitParams,
) -> CosfitStatus {
    guard(|| {
        let s = &as_ref(signal, "signal")?.inner;
        let out = as_mut(out, "out")?;
        *out = fipeft::estimate_initial_params(s)?.into();
        Ok(())
    })
}

/// Initial parameter estimate with the frequency from the periodogram peak.
///
/// # Safety
/// `signal` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_estimate_lombscargle(
    signal: *const CosfitSignal,
    out: *mut CosfitParams,
) -> CosfitStatus {
    guard(|| {
        let s = &as_ref(signal, "signal")?.inner;
        let out = as_mut(out, "out")?;
        *out = lombscargle::estimate_initial_params(s)?.into();
        Ok(())
    })
}

/// Frequency (cycles per unit x) of the Lomb-Scargle periodogram peak.
///
/// # Safety
/// `signal` must be a live handle and `f_out` writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_lombscargle_peak(
    signal: *const CosfitSignal,
    f_out: *mut f64,
) -> CosfitStatus {
    guard(|| {
        let s = &as_ref(signal, "signal")?.inner;
        let f_out = as_mut(f_out, "f_out")?;
        *f_out = lombscargle::peak_frequency(s, fipeft::prepare_stats(s).a1_hat)?;
        Ok(())
    })
}

/// Levenberg-Marquardt refinement from `init`. `max_iterations = 0` uses
/// the default cap. Running out of iterations is not an error; check
/// `converged`.
///
/// # Safety
/// `signal` must be a live handle, `init` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cosfit_fit(
    signal: *const CosfitSignal,
    init: *const CosfitParams,
    max_iterations: u32,
    out: *mut CosfitFitResult,
) -> CosfitStatus {
    guard(|| {
        let s = &as_ref(signal, "signal")?.inner;
        let init = *as_ref(init, "init")?;
        let out = as_mut(out, "out")?;
        let mut cfg = LmConfig::default();
        if max_iterations > 0 {
            cfg.max_iterations = max_iterations as usize;
        }
        let fit = lm_fit(s, init.into(), &cfg)?;
        *out = CosfitFitResult {
            params: fit.params.into(),
            chi2: fit.chi2,
            iterations: fit.iterations.try_into().unwrap_or(u32::MAX),
            converged: u8::from(fit.converged),
        };
        Ok(())
    })
}
