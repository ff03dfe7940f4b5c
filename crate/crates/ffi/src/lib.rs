//! C ABI over `hypercap`.
//!
//! Polynomials cross the boundary as opaque `HcPolynomial` handles. Every
//! fallible call returns an `HcStatus`; on failure the message is kept per
//! thread and can be read with `hc_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypercap::capacity::{approximate_coefficient, capacity, improved_approximate, CapacityOptions, CapacityStatus};
use hypercap::exact::{mixed_discriminant_exact, permanent_exact, ExactValue};
use hypercap::polynomials::io::{parse_input, LoadedInput};
use hypercap::polynomials::{build_multilinear, mixed_form, NonnegativeMatrix, PolynomialOracle};
use hypercap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    InvalidInput = 1,
    ZeroPolynomial = 2,
    BudgetExceeded = 3,
    HyperbolicityViolation = 4,
    NotConverged = 5,
    Numerical = 6,
    Io = 7,
    NullPointer = 8,
    /// The operation does not apply to this kind of polynomial.
    WrongKind = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcCapacityStatus {
    Converged = 0,
    BudgetExhausted = 1,
    UnboundedBelowSuspected = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcCapacityReport {
    pub cap_estimate: f64,
    /// `Cap(p) >= cap_estimate * exp(-gap_bound)`.
    pub gap_bound: f64,
    pub iterations: usize,
    pub status: HcCapacityStatus,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcApproximation {
    pub estimate: f64,
    pub coefficient_lower: f64,
    pub coefficient_upper: f64,
    pub factor: f64,
    pub derivatives_taken: usize,
}

/// Opaque polynomial handle.
pub struct HcPolynomial {
    input: Option<LoadedInput>,
    oracle: PolynomialOracle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::InvalidInput(_) => HcStatus::InvalidInput,
        Error::ZeroPolynomial(_) => HcStatus::ZeroPolynomial,
        Error::BudgetExceeded(_) => HcStatus::BudgetExceeded,
        Error::HyperbolicityViolation(_) => HcStatus::HyperbolicityViolation,
        Error::NotConverged(_) => HcStatus::NotConverged,
        Error::Numerical(_) => HcStatus::Numerical,
        Error::Io(_) => HcStatus::Io,
    }
}

struct Failure(HcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HcStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translate errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HcStatus::Panic
        }
    }
}

unsafe fn handle<'a>(p: *const HcPolynomial) -> Result<&'a HcPolynomial, Failure> {
    p.as_ref().ok_or_else(|| null("polynomial handle"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

fn boxed(out: *mut *mut HcPolynomial, input: Option<LoadedInput>, oracle: PolynomialOracle) -> Result<(), Failure> {
    // SAFETY: checked non-null by the caller
    unsafe { *out = Box::into_raw(Box::new(HcPolynomial { input, oracle })) };
    Ok(())
}

/// Build a polynomial from an input document (`matrix`, `tuple` or `sparse` kind).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_from_json(json: *const c_char, out: *mut *mut HcPolynomial) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(HcStatus::InvalidInput, "input is not UTF-8".into()))?;
        let input = parse_input(text)?;
        let oracle = input.oracle()?;
        boxed(out, Some(input), oracle)
    })
}

/// Build the multilinear polynomial of a nonnegative `n x n` matrix given row-major.
///
/// # Safety
/// `entries` must point to `n * n` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_from_matrix(
    entries: *const f64,
    n: usize,
    out: *mut *mut HcPolynomial,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let len = n.checked_mul(n).ok_or_else(|| Failure(HcStatus::InvalidInput, "n is too large".into()))?;
        let flat = slice(entries, len, "entries")?;
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let a = NonnegativeMatrix::from_rows(&rows)?;
        let oracle = build_multilinear(&a)?;
        boxed(out, Some(LoadedInput::Matrix(a)), oracle)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `p` must come from one of the constructors and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_free(p: *mut HcPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_num_vars(p: *const HcPolynomial) -> usize {
    p.as_ref().map_or(0, |h| h.oracle.num_vars())
}

/// Total degree, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_degree(p: *const HcPolynomial) -> usize {
    p.as_ref().map_or(0, |h| h.oracle.degree())
}

/// Evaluate at `x` (length `len`, which must equal the number of variables).
///
/// # Safety
/// `x` must point to `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_polynomial_eval(
    p: *const HcPolynomial,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = h.oracle.evaluate(slice(x, len, "x")?)?;
        Ok(())
    })
}

/// Mixed form `∂^n/∂t_1..∂t_n p(Σ t_i X_i)` for `n` points stored row-major in `xs`.
///
/// # Safety
/// `xs` must point to `degree * num_vars` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_mixed_form(p: *const HcPolynomial, xs: *const f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (n, m) = (h.oracle.degree(), h.oracle.num_vars());
        let points: Vec<Vec<f64>> = slice(xs, n * m, "xs")?.chunks(m.max(1)).map(<[f64]>::to_vec).collect();
        *out = mixed_form(&h.oracle, &points)?;
        Ok(())
    })
}

/// Capacity `inf_{x > 0, Πx = 1} p(x)` to log-gap `tol`.
///
/// When `minimizer` is non-null it receives the log-space minimizer and must
/// hold `num_vars` doubles.
///
/// # Safety
/// `out` must be valid; `minimizer` must be null or hold `num_vars` doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_capacity(
    p: *const HcPolynomial,
    tol: f64,
    out: *mut HcCapacityReport,
    minimizer: *mut f64,
) -> HcStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure(HcStatus::InvalidInput, format!("tol must be positive, got {tol}")));
        }
        let r = capacity(&h.oracle, &CapacityOptions::with_tol(tol))?;
        *out = HcCapacityReport {
            cap_estimate: r.cap_estimate,
            gap_bound: r.gap_bound,
            iterations: r.iterations,
            status: match r.status {
                CapacityStatus::Converged => HcCapacityStatus::Converged,
                CapacityStatus::BudgetExhausted => HcCapacityStatus::BudgetExhausted,
                CapacityStatus::UnboundedBelowSuspected => HcCapacityStatus::UnboundedBelowSuspected,
            },
        };
        if !minimizer.is_null() {
            ptr::copy_nonoverlapping(r.minimizer.as_ptr(), minimizer, r.minimizer.len());
        }
        Ok(())
    })
}

/// Deterministic estimate of the coefficient of `x_1..x_n`; `m > 0` first
/// differentiates away `ceil(m log2 n)` variables.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hc_approximate_coefficient(
    p: *const HcPolynomial,
    m: u32,
    out: *mut HcApproximation,
) -> HcStatus {
    guard(|| {
        let h = handle(p)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let a = if m == 0 { approximate_coefficient(&h.oracle)? } else { improved_approximate(&h.oracle, m)? };
        *out = HcApproximation {
            estimate: a.estimate,
            coefficient_lower: a.coefficient_lower,
            coefficient_upper: a.coefficient_upper,
            factor: a.factor,
            derivatives_taken: a.derivatives_taken,
        };
        Ok(())
    })
}

fn exact_of(h: &HcPolynomial, permanent: bool) -> Result<ExactValue, Failure> {
    match (&h.input, permanent) {
        (Some(LoadedInput::Matrix(a)), true) => Ok(permanent_exact(a)?),
        (Some(LoadedInput::Tuple(t)), false) => Ok(mixed_discriminant_exact(t)?),
        _ => Err(Failure(
            HcStatus::WrongKind,
            if permanent { "permanent needs a matrix input" } else { "mixed discriminant needs a tuple input" }.into(),
        )),
    }
}

unsafe fn write_exact(
    p: *const HcPolynomial,
    permanent: bool,
    value: *mut f64,
    text: *mut *mut c_char,
) -> HcStatus {
    guard(|| {
        let h = handle(p)?;
        if !text.is_null() {
            *text = ptr::null_mut();
        }
        let v = exact_of(h, permanent)?;
        if let Some(value) = value.as_mut() {
            *value = v.to_f64();
        }
        if !text.is_null() {
            *text = CString::new(v.value.to_string()).unwrap_or_default().into_raw();
        }
        Ok(())
    })
}

/// Exact permanent of a matrix-backed handle. `value` and `text` may each be
/// null; a non-null `text` receives a rational string to release with
/// `hc_string_free`.
///
/// # Safety
/// Non-null pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_permanent(p: *const HcPolynomial, value: *mut f64, text: *mut *mut c_char) -> HcStatus {
    write_exact(p, true, value, text)
}

/// Exact mixed discriminant of a tuple-backed handle; see `hc_permanent`.
///
/// # Safety
/// Non-null pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hc_mixed_discriminant(
    p: *const HcPolynomial,
    value: *mut f64,
    text: *mut *mut c_char,
) -> HcStatus {
    write_exact(p, false, value, text)
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn hc_status_name(status: HcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        HcStatus::Ok => c"ok",
        HcStatus::InvalidInput => c"invalid input",
        HcStatus::ZeroPolynomial => c"zero polynomial",
        HcStatus::BudgetExceeded => c"budget exceeded",
        HcStatus::HyperbolicityViolation => c"hyperbolicity violation",
        HcStatus::NotConverged => c"not converged",
        HcStatus::Numerical => c"numerical failure",
        HcStatus::Io => c"i/o error",
        HcStatus::NullPointer => c"null pointer",
        HcStatus::WrongKind => c"wrong input kind",
        HcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => c"unknown",
    };
    VERSION.as_ptr()
}
