//! C ABI over `gammadyn`.
//!
//! Matrices cross the boundary as row-major arrays of interleaved
//! `(re, im)` doubles, `2·n·n` values for an `n × n` matrix. Every function
//! returns a [`GdStatus`]; on failure the message is available from
//! [`gd_last_error_message`] on the same thread. Handles are released with
//! the matching `*_free` function, which accepts null.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gammadyn::biortho::{analyze_hamiltonian, metric_operators, BiorthogonalSystem, MetricPair};
use gammadyn::dynamics::{delta_gamma, gamma_series, gamma_t};
use gammadyn::linalg::C64;
use gammadyn::symmetry::{symmetry_report, DEFAULT_T_SAMPLES};
use gammadyn::{ComplexMatrix, Error, ToleranceConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    NonFinite = 3,
    InvalidTolerance = 4,
    NoConvergence = 5,
    Singular = 6,
    SpectrumNotReal = 7,
    Degenerate = 8,
    Truncation = 9,
    Contract = 10,
    Internal = 11,
    Panic = 12,
}

/// Opaque square complex matrix.
pub struct GdMatrix {
    inner: ComplexMatrix,
}

/// Opaque biorthogonal system with its metric operators.
pub struct GdSystem {
    system: BiorthogonalSystem,
    metric: MetricPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

impl From<&Error> for GdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension { .. } => GdStatus::Dimension,
            Error::NonFinite { .. } => GdStatus::NonFinite,
            Error::InvalidTolerance { .. } => GdStatus::InvalidTolerance,
            Error::NoConvergence { .. } => GdStatus::NoConvergence,
            Error::Singular { .. } => GdStatus::Singular,
            Error::SpectrumNotReal { .. } => GdStatus::SpectrumNotReal,
            Error::Degenerate { .. } => GdStatus::Degenerate,
            Error::Truncation { .. } => GdStatus::Truncation,
            Error::Contract(_) => GdStatus::Contract,
            Error::Internal(_) => GdStatus::Internal,
        }
    }
}

struct Failure(GdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(GdStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GdStatus::Panic
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const GdMatrix, what: &str) -> Result<&'a ComplexMatrix, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

unsafe fn system_ref<'a>(s: *const GdSystem) -> Result<&'a GdSystem, Failure> {
    s.as_ref().ok_or_else(|| null("system"))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn boxed_matrix(m: ComplexMatrix) -> GdMatrix {
    GdMatrix { inner: m }
}

/// Builds an `n × n` matrix from `2·n·n` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·n·n` readable doubles and `out` to a writable
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn gd_matrix_new(n: usize, data: *const f64, out: *mut *mut GdMatrix) -> GdStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = n
            .checked_mul(n)
            .and_then(|k| k.checked_mul(2))
            .ok_or_else(|| Failure(GdStatus::Dimension, format!("dimension {n} overflows")))?;
        let raw = std::slice::from_raw_parts(data, len);
        let entries = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let m = ComplexMatrix::from_vec(n, n, entries)?;
        store(out, boxed_matrix(m))
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gd_matrix_free(m: *mut GdMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_matrix_dimension(m: *const GdMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.rows())
}

/// Copies the entries into `out`, which must hold `len ≥ 2·n·n` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_matrix_read(m: *const GdMatrix, out: *mut f64, len: usize) -> GdStatus {
    guard(|| {
        let m = matrix_ref(m, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 2 * m.rows() * m.cols();
        if len < need {
            return Err(Failure(GdStatus::Dimension, format!("buffer holds {len} doubles, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(m.data()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// `γ^t(X) = e^{iH†t} X e^{−iHt}`.
///
/// # Safety
/// `h` and `x` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_gamma_t(
    h: *const GdMatrix,
    x: *const GdMatrix,
    t: f64,
    out: *mut *mut GdMatrix,
) -> GdStatus {
    guard(|| {
        let r = gamma_t(matrix_ref(h, "h")?, matrix_ref(x, "x")?, t)?;
        store(out, boxed_matrix(r))
    })
}

/// `γ^t(X)` by its power series; `terms` (may be null) receives the
/// number of terms summed.
///
/// # Safety
/// `h` and `x` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_gamma_series(
    h: *const GdMatrix,
    x: *const GdMatrix,
    t: f64,
    series_tol: f64,
    out: *mut *mut GdMatrix,
    terms: *mut usize,
) -> GdStatus {
    guard(|| {
        let tol = ToleranceConfig {
            series_tol,
            ..ToleranceConfig::default()
        };
        tol.validate()?;
        let r = gamma_series(matrix_ref(h, "h")?, matrix_ref(x, "x")?, t, &tol)?;
        if let Some(k) = terms.as_mut() {
            *k = r.terms_used.unwrap_or(0);
        }
        store(out, boxed_matrix(r.evolved))
    })
}

/// `δ_γ(X) = i(H†X − XH)`.
///
/// # Safety
/// `h` and `x` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_delta_gamma(h: *const GdMatrix, x: *const GdMatrix, out: *mut *mut GdMatrix) -> GdStatus {
    guard(|| {
        let r = delta_gamma(matrix_ref(h, "h")?, matrix_ref(x, "x")?)?;
        store(out, boxed_matrix(r))
    })
}

/// Biorthogonal eigensystem and metric of `h` with default tolerances.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_system_analyze(h: *const GdMatrix, out: *mut *mut GdSystem) -> GdStatus {
    guard(|| {
        let tol = ToleranceConfig::default();
        let system = analyze_hamiltonian(matrix_ref(h, "h")?, &tol)?;
        let metric = metric_operators(&system, &tol)?;
        store(out, GdSystem { system, metric })
    })
}

/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gd_system_free(s: *mut GdSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Ascending eigenvalues into `out[0..len]`, `len ≥ n`.
///
/// # Safety
/// `s` must be a live handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_system_eigenvalues(s: *const GdSystem, out: *mut f64, len: usize) -> GdStatus {
    guard(|| {
        let s = system_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let e = &s.system.eigenvalues;
        if len < e.len() {
            return Err(Failure(GdStatus::Dimension, format!("buffer holds {len} doubles, need {}", e.len())));
        }
        std::slice::from_raw_parts_mut(out, e.len()).copy_from_slice(e);
        Ok(())
    })
}

/// The metric `S_Ψ = Σ_k |Ψ_k⟩⟨Ψ_k|`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_system_metric(s: *const GdSystem, out: *mut *mut GdMatrix) -> GdStatus {
    guard(|| {
        let s = system_ref(s)?;
        store(out, boxed_matrix(s.metric.s_psi.clone()))
    })
}

/// Writes 1 to `is_symmetry` when `γ^t(X) = X` for all `t`, else 0.
///
/// # Safety
/// `s` and `x` must be live handles and `is_symmetry` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_symmetry_check(s: *const GdSystem, x: *const GdMatrix, is_symmetry: *mut i32) -> GdStatus {
    guard(|| {
        let s = system_ref(s)?;
        let x = matrix_ref(x, "x")?;
        let flag = is_symmetry.as_mut().ok_or_else(|| null("is_symmetry"))?;
        let r = symmetry_report(
            &s.system.hamiltonian,
            &s.metric,
            x,
            &DEFAULT_T_SAMPLES,
            &ToleranceConfig::default(),
        )?;
        *flag = r.verdict as i32;
        Ok(())
    })
}

/// Message of the last failed call on this thread; empty after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn gd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
