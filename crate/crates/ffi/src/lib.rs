//! C ABI for `padic-cf`.
//!
//! Expansions live behind opaque `PcfExpansion` handles. Every fallible call
//! returns a `PcfStatus`; on failure `pcf_last_error` holds the message for
//! the calling thread. Strings handed out by the library must be released
//! with `pcf_string_free`, handles with `pcf_expansion_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use padic_cf::{
    classify, evaluate_periodic, expand, jp_expand, redei_expansion, AlgorithmId, Convention, Error, Expansion,
    PadicContext, QpNumber, Status,
};

/// Result codes. Values above `Ok` mirror the library's error variants.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    InvalidPrime = 10,
    InvalidContext = 11,
    NonResidue = 12,
    InvalidInput = 13,
    NegativeValuation = 14,
    DivisionByZero = 15,
    ConventionMismatch = 16,
    SchneiderDomain = 17,
    Terminated = 18,
    IndexBeyondFinite = 19,
    NotFinite = 20,
    NotPeriodic = 21,
    InconsistentPeriod = 22,
    UnsupportedAlgorithm = 23,
    UnsupportedInput = 24,
    DegenerateZ = 25,
    Parse = 26,
}

impl From<&Error> for PcfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidPrime(_) => PcfStatus::InvalidPrime,
            Error::InvalidContext(_) => PcfStatus::InvalidContext,
            Error::NonResidue(_) => PcfStatus::NonResidue,
            Error::InvalidInput(_) => PcfStatus::InvalidInput,
            Error::NegativeValuation => PcfStatus::NegativeValuation,
            Error::DivisionByZero => PcfStatus::DivisionByZero,
            Error::ConventionMismatch(_) => PcfStatus::ConventionMismatch,
            Error::SchneiderDomain => PcfStatus::SchneiderDomain,
            Error::Terminated => PcfStatus::Terminated,
            Error::IndexBeyondFinite { .. } => PcfStatus::IndexBeyondFinite,
            Error::NotFinite => PcfStatus::NotFinite,
            Error::NotPeriodic => PcfStatus::NotPeriodic,
            Error::InconsistentPeriod(_) => PcfStatus::InconsistentPeriod,
            Error::UnsupportedAlgorithm(_) => PcfStatus::UnsupportedAlgorithm,
            Error::UnsupportedInput(_) => PcfStatus::UnsupportedInput,
            Error::DegenerateZ => PcfStatus::DegenerateZ,
            Error::Parse(_) => PcfStatus::Parse,
        }
    }
}

/// Kind of a finished expansion.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfKind {
    Finite = 0,
    Periodic = 1,
    Truncated = 2,
}

/// Termination data of an expansion. `pre_period` and `period` are set for
/// `Periodic`, `steps` for `Truncated`; unused fields are zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcfStatusInfo {
    pub kind: PcfKind,
    pub pre_period: usize,
    pub period: usize,
    pub steps: usize,
}

/// Opaque expansion handle.
pub struct PcfExpansion {
    inner: Expansion,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, recording errors and containing panics.
fn guard(f: impl FnOnce() -> Result<(), (PcfStatus, String)>) -> PcfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PcfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PcfStatus::Panic
        }
    }
}

fn lib(e: Error) -> (PcfStatus, String) {
    ((&e).into(), e.to_string())
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (PcfStatus, String)> {
    if s.is_null() {
        return Err((PcfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (PcfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (PcfStatus, String)> {
    p.as_mut().ok_or_else(|| (PcfStatus::NullPointer, format!("{what} is null")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no nul").into_raw()
}

fn context(p: u64, alg: AlgorithmId, budget: usize) -> Result<PadicContext, (PcfStatus, String)> {
    let ctx = alg.context(p).map_err(lib)?;
    if budget == 0 {
        Ok(ctx)
    } else {
        ctx.with_budget(budget).map_err(lib)
    }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn pcf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Expands `value` (`a/b` or `quad:P,Q,D[,conj]`) at prime `p` with the named
/// algorithm. A `max_steps` of zero keeps the default budget.
///
/// # Safety
/// `algorithm` and `value` must be nul-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expand(
    p: u64,
    algorithm: *const c_char,
    value: *const c_char,
    max_steps: usize,
    out: *mut *mut PcfExpansion,
) -> PcfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let alg: AlgorithmId = text(algorithm, "algorithm")?.parse().map_err(lib)?;
        let x: QpNumber = text(value, "value")?.parse().map_err(lib)?;
        let ctx = context(p, alg, max_steps)?;
        let e = expand(&x, alg, &ctx).map_err(lib)?;
        *out = Box::into_raw(Box::new(PcfExpansion { inner: e }));
        Ok(())
    })
}

/// Parses an expansion from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_from_json(json: *const c_char, out: *mut *mut PcfExpansion) -> PcfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let v: serde_json::Value = serde_json::from_str(text(json, "json")?)
            .map_err(|e| (PcfStatus::Parse, format!("Parse: {e}")))?;
        let e = Expansion::from_json(&v).map_err(lib)?;
        *out = Box::into_raw(Box::new(PcfExpansion { inner: e }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `e` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_free(e: *mut PcfExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle and `info` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_status(e: *const PcfExpansion, info: *mut PcfStatusInfo) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        let info = out_ptr(info, "info")?;
        *info = match e.inner.status() {
            Status::Finite => PcfStatusInfo { kind: PcfKind::Finite, pre_period: 0, period: 0, steps: 0 },
            Status::Periodic { pre_period, period } => {
                PcfStatusInfo { kind: PcfKind::Periodic, pre_period, period, steps: 0 }
            }
            Status::Truncated { steps } => PcfStatusInfo { kind: PcfKind::Truncated, pre_period: 0, period: 0, steps },
        };
        Ok(())
    })
}

/// Number of stored partial quotients (pre-period plus one period for
/// periodic expansions).
///
/// # Safety
/// `e` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_len(e: *const PcfExpansion, len: *mut usize) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        *out_ptr(len, "len")? = e.inner.stored_quotients().len();
        Ok(())
    })
}

/// Partial quotient `a_n` as `num/den` text; periodic expansions extend
/// past the stored block.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_quotient(e: *const PcfExpansion, n: usize, out: *mut *mut c_char) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let a = e.inner.quotient(n).map_err(lib)?;
        *out = owned(padic_cf::padic::fmt_rational(&a));
        Ok(())
    })
}

/// Text form, e.g. `[1, 44/7 | 48/7]`.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_to_string(e: *const PcfExpansion, out: *mut *mut c_char) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        let out = out_ptr(out, "out")?;
        *out = owned(e.inner.to_string());
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_to_json(e: *const PcfExpansion, out: *mut *mut c_char) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        let out = out_ptr(out, "out")?;
        *out = owned(serde_json::to_string(&e.inner.to_json()).expect("serializable"));
        Ok(())
    })
}

/// Value of a periodic expansion as `a/b` or `quad:P,Q,D[,conj]`.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_expansion_value(e: *const PcfExpansion, out: *mut *mut c_char) -> PcfStatus {
    guard(|| {
        let e = e.as_ref().ok_or((PcfStatus::NullPointer, "expansion is null".to_string()))?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let x = match e.inner.status() {
            Status::Finite => QpNumber::from_rational(padic_cf::evaluate_finite(&e.inner).map_err(lib)?),
            _ => evaluate_periodic(&e.inner).map_err(lib)?,
        };
        *out = owned(x.to_string());
        Ok(())
    })
}

/// Classification JSON, as printed by `padic-cf classify`.
///
/// # Safety
/// `algorithm` and `value` must be nul-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_classify_json(
    p: u64,
    algorithm: *const c_char,
    value: *const c_char,
    budget: usize,
    out: *mut *mut c_char,
) -> PcfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let alg: AlgorithmId = text(algorithm, "algorithm")?.parse().map_err(lib)?;
        let x: QpNumber = text(value, "value")?.parse().map_err(lib)?;
        let c = classify(&x, alg, &context(p, alg, budget)?).map_err(lib)?;
        *out = owned(serde_json::to_string(&c.to_json()).expect("serializable"));
        Ok(())
    })
}

/// Redei expansion `[z | -(h+2z)/(z^2+hz-d), h+2z]` at prime `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_redei(h: i64, d: i64, z: i64, p: u64, out: *mut *mut PcfExpansion) -> PcfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let ctx = PadicContext::new(p, Convention::Balanced).map_err(lib)?;
        let e = redei_expansion(&BigInt::from(h), &BigInt::from(d), &BigInt::from(z), &ctx).map_err(lib)?;
        *out = Box::into_raw(Box::new(PcfExpansion { inner: e }));
        Ok(())
    })
}

/// Jacobi-Perron expansion of a comma-separated tuple, as JSON.
///
/// # Safety
/// `values` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcf_jp_json(p: u64, values: *const c_char, max_steps: usize, out: *mut *mut c_char) -> PcfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let xs = padic_cf::cli::split_values(text(values, "values")?).map_err(lib)?;
        let mut ctx = PadicContext::new(p, Convention::Balanced).map_err(lib)?;
        if max_steps > 0 {
            ctx = ctx.with_budget(max_steps).map_err(lib)?;
        }
        let e = jp_expand(&xs, &ctx).map_err(lib)?;
        *out = owned(serde_json::to_string(&e.to_json()).expect("serializable"));
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pcf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
