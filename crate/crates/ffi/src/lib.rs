//! C ABI over `slice_clifford`.
//!
//! Every fallible function returns an [`SlcStatus`]. On failure a message is
//! kept per thread and can be read with [`slc_last_error`]. Handles are
//! opaque, created by `*_new`/constructor functions and released with the
//! matching `*_free`. Strings returned to the caller are freed with
//! [`slc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use slice_clifford::clifford::DEFAULT_TOL;
use slice_clifford::harness::{run_suite, RunConfig, Suite};
use slice_clifford::series::{convex_test_map, koebe_map, ConvexVariant, StemSeries};
use slice_clifford::slice::SlicePoint;
use slice_clifford::slice_map::{eval, SliceMap};
use slice_clifford::{CliffordElement, Error};

/// Result codes. `SLC_STATUS_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NotInvertible = 4,
    Domain = 5,
    Hypothesis = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque Clifford element.
pub struct SlcElement {
    inner: CliffordElement,
}

/// Opaque slice map built from a truncated stem series.
pub struct SlcMap {
    inner: SliceMap<StemSeries>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SlcStatus {
    match e {
        Error::Dimension(_) | Error::TooManyGenerators { .. } => SlcStatus::Dimension,
        Error::NotInvertible { .. } | Error::NotInCone => SlcStatus::NotInvertible,
        Error::NotInSlice | Error::Representation(_) | Error::Basis(_) | Error::Sampling(_) => SlcStatus::Domain,
        Error::Hypothesis(_) | Error::Criterion(_) | Error::Gauge(_) => SlcStatus::Hypothesis,
        Error::NotImaginaryUnit(_) | Error::Config(_) => SlcStatus::InvalidArgument,
        Error::Io(_) => SlcStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, records any failure, and never unwinds into C.
fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> SlcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SlcStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SlcStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            SlcStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SlcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn floats<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out_ptr<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn slc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn slc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn slc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an element of `R_m` from its `2^m` coefficients in blade order
/// (bit `h-1` of the index stands for `e_h`).
///
/// # Safety
/// `coeffs` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_element_new(
    m: usize,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut SlcElement,
) -> SlcStatus {
    guard(|| {
        let c = floats(coeffs, len, "coeffs")?;
        let inner = CliffordElement::from_coeffs(m, c.to_vec())?;
        out_ptr(out, SlcElement { inner })
    })
}

/// # Safety
/// `e` must be NULL or a handle from this library that was not freed.
#[no_mangle]
pub unsafe extern "C" fn slc_element_free(e: *mut SlcElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of generators `m`, or 0 for NULL.
///
/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn slc_element_generators(e: *const SlcElement) -> usize {
    e.as_ref().map_or(0, |e| e.inner.m())
}

/// Copies the `2^m` coefficients into `out`, which must hold `len >= 2^m` doubles.
///
/// # Safety
/// `e` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn slc_element_coeffs(e: *const SlcElement, out: *mut f64, len: usize) -> SlcStatus {
    guard(|| {
        let e = deref(e, "element")?;
        let c = e.inner.coeffs();
        if len < c.len() {
            return Err(Failure::Invalid(format!("buffer holds {len} doubles, need {}", c.len())));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), out, c.len());
        Ok(())
    })
}

/// `out = a b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_element_mul(
    a: *const SlcElement,
    b: *const SlcElement,
    out: *mut *mut SlcElement,
) -> SlcStatus {
    guard(|| {
        let inner = deref(a, "a")?.inner.try_mul(&deref(b, "b")?.inner)?;
        out_ptr(out, SlcElement { inner })
    })
}

/// `out = a + b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_element_add(
    a: *const SlcElement,
    b: *const SlcElement,
    out: *mut *mut SlcElement,
) -> SlcStatus {
    guard(|| {
        let inner = deref(a, "a")?.inner.try_add(&deref(b, "b")?.inner)?;
        out_ptr(out, SlcElement { inner })
    })
}

/// Clifford conjugate.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_element_conjugate(a: *const SlcElement, out: *mut *mut SlcElement) -> SlcStatus {
    guard(|| {
        let inner = deref(a, "a")?.inner.conjugate();
        out_ptr(out, SlcElement { inner })
    })
}

/// Two-sided inverse; `SLC_STATUS_NOT_INVERTIBLE` for zero divisors.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_element_invert(a: *const SlcElement, out: *mut *mut SlcElement) -> SlcStatus {
    guard(|| {
        let inner = deref(a, "a")?.inner.invert(DEFAULT_TOL)?;
        out_ptr(out, SlcElement { inner })
    })
}

/// Componentwise Koebe-type map `x_t (1 - x_t e^{Iθ})^{-*2}` truncated at degree `truncation`.
///
/// # Safety
/// `unit` must be a live handle holding an element of `S_m`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_map_koebe(
    n: usize,
    theta: f64,
    unit: *const SlcElement,
    truncation: usize,
    out: *mut *mut SlcMap,
) -> SlcStatus {
    guard(|| {
        let i = &deref(unit, "unit")?.inner;
        let inner = SliceMap::new(koebe_map(theta, i, truncation, n)?);
        out_ptr(out, SlcMap { inner })
    })
}

/// Componentwise `x_t (1 - x_t e^{Iθ})^{-*1}`.
///
/// # Safety
/// `unit` must be a live handle holding an element of `S_m`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_map_cayley(
    n: usize,
    theta: f64,
    unit: *const SlcElement,
    truncation: usize,
    out: *mut *mut SlcMap,
) -> SlcStatus {
    guard(|| {
        let i = &deref(unit, "unit")?.inner;
        let inner = SliceMap::new(convex_test_map(theta, i, truncation, n, ConvexVariant::Cayley)?);
        out_ptr(out, SlcMap { inner })
    })
}

/// Builds a map from the stem-series JSON form `{"m", "n", "N", "terms": [{"k", "a"}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn slc_map_from_json(json: *const c_char, out: *mut *mut SlcMap) -> SlcStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        let stem: StemSeries =
            serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("stem series: {e}")))?;
        out_ptr(out, SlcMap { inner: SliceMap::new(stem) })
    })
}

/// # Safety
/// `f` must be NULL or a handle from this library that was not freed.
#[no_mangle]
pub unsafe extern "C" fn slc_map_free(f: *mut SlcMap) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Evaluates `f(α + βJ)` for `n` variables and writes the `n · 2^m`
/// output coefficients, component after component, into `out`.
///
/// # Safety
/// `alpha` and `beta` must hold `n` doubles, `j` must be a live handle,
/// and `out` must hold `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn slc_map_eval(
    f: *const SlcMap,
    alpha: *const f64,
    beta: *const f64,
    n: usize,
    j: *const SlcElement,
    out: *mut f64,
    out_len: usize,
) -> SlcStatus {
    guard(|| {
        let f = &deref(f, "map")?.inner;
        let j = &deref(j, "j")?.inner;
        if n != f.n() {
            return Err(Error::Dimension(format!("map has {} variables, got {n}", f.n())).into());
        }
        if j.m() != f.m() {
            return Err(Error::Dimension(format!("map lives in R_{}, J in R_{}", f.m(), j.m())).into());
        }
        let p = SlicePoint::new_raw(floats(alpha, n, "alpha")?.to_vec(), floats(beta, n, "beta")?.to_vec(), j.clone())?;
        let values = eval(f, &p);
        let need = n << f.m();
        if out_len < need {
            return Err(Failure::Invalid(format!("buffer holds {out_len} doubles, need {need}")));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let dst = slice::from_raw_parts_mut(out, need);
        for (chunk, v) in dst.chunks_mut(1 << f.m()).zip(&values) {
            chunk.copy_from_slice(v.coeffs());
        }
        Ok(())
    })
}

/// Runs a verification suite. `config_json` may be NULL for defaults; the
/// JSON report is returned in `report` (free with [`slc_string_free`]) and
/// `passed` receives whether every asserted check passed.
///
/// # Safety
/// `suite` must be a NUL-terminated string, `config_json` NULL or one, and
/// `report`/`passed` writable.
#[no_mangle]
pub unsafe extern "C" fn slc_run_suite(
    suite: *const c_char,
    config_json: *const c_char,
    report: *mut *mut c_char,
    passed: *mut bool,
) -> SlcStatus {
    guard(|| {
        let name: Suite = c_str(suite, "suite")?.parse()?;
        let cfg: RunConfig = if config_json.is_null() {
            RunConfig::default()
        } else {
            serde_json::from_str(c_str(config_json, "config_json")?)
                .map_err(|e| Failure::Invalid(format!("config: {e}")))?
        };
        if report.is_null() || passed.is_null() {
            return Err(Failure::Null("report/passed"));
        }
        let rep = run_suite(name, &cfg)?;
        let text = serde_json::to_string(&rep).map_err(|e| Failure::Invalid(e.to_string()))?;
        *passed = rep.pass;
        *report = CString::new(text)
            .map_err(|e| Failure::Invalid(e.to_string()))?
            .into_raw();
        Ok(())
    })
}
