//! C ABI over the `kruglov` library.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`KrStatus`]; on failure, [`kr_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use kruglov::kruglov::{kruglov_charfn, kruglov_exact, kruglov_mc, DiscreteDistribution};
use kruglov::orlicz::{luxemburg_seq_norm, OrliczFunction};
use kruglov::verify::{run_suite, Suite, SuiteOptions};
use kruglov::Error;

/// Result of a call. The numeric values match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrStatus {
    Ok = 0,
    /// A verification ran and at least one check failed.
    CheckFailed = 1,
    /// Malformed input, bad argument or null pointer.
    InvalidInput = 2,
    /// A mathematical precondition does not hold.
    Precondition = 3,
    /// An atom or dimension cap was hit.
    CapExceeded = 4,
    /// The library panicked. This is a bug.
    Internal = 5,
}

/// Opaque Orlicz function.
pub struct KrOrlicz(OrliczFunction);

/// Opaque finitely supported probability law.
pub struct KrDistribution(DiscreteDistribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> KrStatus {
    match err.exit_code() {
        3 => KrStatus::Precondition,
        4 => KrStatus::CapExceeded,
        _ => KrStatus::InvalidInput,
    }
}

fn invalid(msg: &str) -> KrStatus {
    set_error(msg.to_string());
    KrStatus::InvalidInput
}

fn guard<F: FnOnce() -> kruglov::Result<KrStatus>>(f: F) -> KrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            KrStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> kruglov::Result<&'a str> {
    if p.is_null() {
        return Err(Error::InvalidArgument("null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Error::InvalidArgument("string is not UTF-8".into()))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize) -> kruglov::Result<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Error::InvalidArgument("null array".into()));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an Orlicz function from its JSON description,
/// e.g. `{"family":"Mp","p":1.5}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kr_orlicz_from_json(json: *const c_char, out: *mut *mut KrOrlicz) -> KrStatus {
    if out.is_null() {
        return invalid("null output pointer");
    }
    guard(|| {
        let m = OrliczFunction::from_json(str_arg(json)?)?;
        *out = Box::into_raw(Box::new(KrOrlicz(m)));
        Ok(KrStatus::Ok)
    })
}

/// Releases an Orlicz handle. Null is ignored.
///
/// # Safety
/// `m` must come from [`kr_orlicz_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kr_orlicz_free(m: *mut KrOrlicz) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `M(t)`, or NaN for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kr_orlicz_eval(m: *const KrOrlicz, t: f64) -> f64 {
    match m.as_ref() {
        Some(m) => m.0.eval(t),
        None => f64::NAN,
    }
}

/// Luxemburg norm of the sequence `x[0..len]` in `l_M`.
///
/// # Safety
/// `m` must be a live handle, `x` must hold `len` values, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kr_luxemburg_seq_norm(
    m: *const KrOrlicz,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> KrStatus {
    let (Some(m), false) = (m.as_ref(), out.is_null()) else {
        return invalid("null handle or output pointer");
    };
    guard(|| {
        let x = slice_arg(x, len)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sequence has a non-finite entry".into()));
        }
        *out = luxemburg_seq_norm(&m.0, x);
        Ok(KrStatus::Ok)
    })
}

/// Builds a law from `len` atoms `(values[i], masses[i])`. Total mass must not exceed 1;
/// any deficit is placed at 0.
///
/// # Safety
/// `values` and `masses` must hold `len` values, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kr_distribution_new(
    values: *const f64,
    masses: *const f64,
    len: usize,
    out: *mut *mut KrDistribution,
) -> KrStatus {
    if out.is_null() {
        return invalid("null output pointer");
    }
    guard(|| {
        let v = slice_arg(values, len)?;
        let w = slice_arg(masses, len)?;
        let law = DiscreteDistribution::new(v.iter().copied().zip(w.iter().copied()).collect())?;
        *out = Box::into_raw(Box::new(KrDistribution(law)));
        Ok(KrStatus::Ok)
    })
}

/// Releases a law handle. Null is ignored.
///
/// # Safety
/// `d` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kr_distribution_free(d: *mut KrDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kr_distribution_len(d: *const KrDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the atoms, sorted by value, into `values` and `masses`.
/// `cap` is the capacity of both buffers and must be at least the atom count.
///
/// # Safety
/// `d` must be a live handle and both buffers must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn kr_distribution_atoms(
    d: *const KrDistribution,
    values: *mut f64,
    masses: *mut f64,
    cap: usize,
) -> KrStatus {
    let Some(d) = d.as_ref() else {
        return invalid("null handle");
    };
    let atoms = d.0.atoms();
    if cap < atoms.len() {
        return invalid("buffer smaller than the atom count");
    }
    if !atoms.is_empty() && (values.is_null() || masses.is_null()) {
        return invalid("null buffer");
    }
    for (i, &(v, m)) in atoms.iter().enumerate() {
        *values.add(i) = v;
        *masses.add(i) = m;
    }
    KrStatus::Ok
}

/// Exact Kruglov law truncated after `kmax` convolution powers. The omitted
/// mass is written to `tail_mass` when it is non-null.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_kruglov_exact(
    d: *const KrDistribution,
    kmax: usize,
    out: *mut *mut KrDistribution,
    tail_mass: *mut f64,
) -> KrStatus {
    let (Some(d), false) = (d.as_ref(), out.is_null()) else {
        return invalid("null handle or output pointer");
    };
    guard(|| {
        let k = kruglov_exact(&d.0, kmax)?;
        if !tail_mass.is_null() {
            *tail_mass = k.tail_mass;
        }
        *out = Box::into_raw(Box::new(KrDistribution(k.law)));
        Ok(KrStatus::Ok)
    })
}

/// Empirical Kruglov law from `trials` seeded samples.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_kruglov_mc(
    d: *const KrDistribution,
    seed: u64,
    trials: u64,
    out: *mut *mut KrDistribution,
) -> KrStatus {
    let (Some(d), false) = (d.as_ref(), out.is_null()) else {
        return invalid("null handle or output pointer");
    };
    guard(|| {
        let law = kruglov_mc(&d.0, seed, trials)?;
        *out = Box::into_raw(Box::new(KrDistribution(law)));
        Ok(KrStatus::Ok)
    })
}

/// Characteristic function of the Kruglov law at `t`, in closed form.
///
/// # Safety
/// `d` must be a live handle and `re`, `im` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_kruglov_charfn(d: *const KrDistribution, t: f64, re: *mut f64, im: *mut f64) -> KrStatus {
    let (Some(d), false, false) = (d.as_ref(), re.is_null(), im.is_null()) else {
        return invalid("null handle or output pointer");
    };
    let c = kruglov_charfn(&d.0, t);
    *re = c.re;
    *im = c.im;
    KrStatus::Ok
}

/// Runs a verification suite by name (`first-orlicz`, `kws`, ..., `all`).
/// `trials == 0` keeps each suite's default. On `Ok` or `CheckFailed`,
/// `*out` receives a JSON array of reports to release with [`kr_string_free`].
///
/// # Safety
/// `suite` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_verify_suite_json(
    suite: *const c_char,
    seed: u64,
    trials: usize,
    out: *mut *mut c_char,
) -> KrStatus {
    if out.is_null() {
        return invalid("null output pointer");
    }
    *out = ptr::null_mut();
    guard(|| {
        let suite: Suite = str_arg(suite)?.parse()?;
        let opts = SuiteOptions { seed, trials: (trials > 0).then_some(trials), ..SuiteOptions::default() };
        let reports = run_suite(suite, &opts)?;
        *out = into_c_string(serde_json::to_string(&reports)?);
        Ok(if reports.iter().all(|r| r.is_ok()) { KrStatus::Ok } else { KrStatus::CheckFailed })
    })
}
