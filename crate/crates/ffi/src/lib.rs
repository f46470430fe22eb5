//! C interface to `cubecf`.
//!
//! Every fallible function returns a [`CubecfStatus`]; on failure the message
//! is available from [`cubecf_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`cubecf_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use num_bigint::BigInt;

use cubecf::cf::{expand_sigma, Expansion};
use cubecf::criteria::{svp_detect, Context, DetectionResult};
use cubecf::kuzmin::{chi2_sf, chi_square, kuzmin_prob, GroupedCounts};
use cubecf::{Error, Precision};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubecfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Violation = 4,
    Io = 5,
    /// A value does not fit the requested C type.
    OutOfRange = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: CubecfStatus, msg: impl Into<String>) -> CubecfStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> CubecfStatus {
    let status = match &e {
        Error::InvalidArgument(_) => CubecfStatus::InvalidArgument,
        Error::Domain(_) => CubecfStatus::Domain,
        Error::Violation(_) => CubecfStatus::Violation,
        Error::Io(_) => CubecfStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting panics into [`CubecfStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), CubecfStatus>) -> CubecfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CubecfStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CubecfStatus::Panic, msg)
        }
    }
}

fn check_ptr<T>(p: *const T, name: &str) -> Result<(), CubecfStatus> {
    if p.is_null() {
        Err(fail(CubecfStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn parse_bigint(p: *const c_char, name: &str) -> Result<BigInt, CubecfStatus> {
    check_ptr(p, name)?;
    let s = CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            CubecfStatus::InvalidArgument,
            format!("{name} is not UTF-8"),
        )
    })?;
    s.trim().parse().map_err(|_| {
        fail(
            CubecfStatus::InvalidArgument,
            format!("{name} is not an integer: {s:?}"),
        )
    })
}

fn to_i64(v: &BigInt, what: &str) -> Result<i64, CubecfStatus> {
    i64::try_from(v).map_err(|_| {
        fail(
            CubecfStatus::OutOfRange,
            format!("{what} = {v} does not fit in 64 bits"),
        )
    })
}

fn precision(digits: u32) -> Precision {
    if digits == 0 {
        Precision::DEFAULT
    } else {
        Precision::digits(digits)
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cubecf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubecf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Partial quotients `b₀ … b_N` of `∛2 − 1` with their convergents.
pub struct CubecfExpansion {
    inner: Expansion,
}

/// Expands through `b_{n_max}`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_new(
    n_max: usize,
    out: *mut *mut CubecfExpansion,
) -> CubecfStatus {
    guard(|| {
        check_ptr(out, "out")?;
        let inner = expand_sigma(n_max).map_err(from_error)?;
        *out = Box::into_raw(Box::new(CubecfExpansion { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`cubecf_expansion_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_free(h: *mut CubecfExpansion) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of terms, `N + 1`.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_len(
    h: *const CubecfExpansion,
    out: *mut usize,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        *out = (&*h).inner.len();
        Ok(())
    })
}

/// `b_n` as an unsigned 64-bit integer.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_quotient(
    h: *const CubecfExpansion,
    n: usize,
    out: *mut u64,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        let c = (&*h)
            .inner
            .get(n)
            .ok_or_else(|| fail(CubecfStatus::OutOfRange, format!("no term {n}")))?;
        *out = u64::try_from(&c.b)
            .map_err(|_| fail(CubecfStatus::OutOfRange, format!("b_{n} exceeds 64 bits")))?;
        Ok(())
    })
}

/// `p_n` and `q_n` as decimal strings, freed with [`cubecf_string_free`].
///
/// # Safety
/// `h` must be a live handle; `p` and `q` valid for writing one pointer each.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_convergent(
    h: *const CubecfExpansion,
    n: usize,
    p: *mut *mut c_char,
    q: *mut *mut c_char,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(p, "p")?;
        check_ptr(q, "q")?;
        let c = (&*h)
            .inner
            .get(n)
            .ok_or_else(|| fail(CubecfStatus::OutOfRange, format!("no term {n}")))?;
        *p = to_c_string(c.p.to_string());
        *q = to_c_string(c.q.to_string());
        Ok(())
    })
}

/// Index `n` with `p_n/q_n = p/q`, or `-1`. `p` and `q` are decimal strings.
///
/// # Safety
/// `h` must be a live handle, `p` and `q` nul-terminated strings, `out`
/// valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_expansion_index_of(
    h: *const CubecfExpansion,
    p: *const c_char,
    q: *const c_char,
    out: *mut i64,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        let (p, q) = (parse_bigint(p, "p")?, parse_bigint(q, "q")?);
        *out = (&*h).inner.index_of(&p, &q).map_or(-1, |n| n as i64);
        Ok(())
    })
}

/// A shortest-vector detection for one lattice index.
pub struct CubecfDetection {
    inner: DetectionResult,
}

/// One Gauss reduction row with 64-bit entries.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CubecfGaussRow {
    pub z1: [i64; 3],
    pub z2: [i64; 3],
    pub norm2: i64,
    pub dot: i64,
    pub k: i64,
}

/// Runs detection at index `j >= 2`. A `precision` of 0 selects the default.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_new(
    j: i64,
    precision_digits: u32,
    out: *mut *mut CubecfDetection,
) -> CubecfStatus {
    guard(|| {
        check_ptr(out, "out")?;
        let ctx = Context::new(precision(precision_digits)).map_err(from_error)?;
        let inner = svp_detect(j, &ctx).map_err(from_error)?;
        *out = Box::into_raw(Box::new(CubecfDetection { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`cubecf_detection_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_free(h: *mut CubecfDetection) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// The sign-normalized shortest vector.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writing three values.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_vector(
    h: *const CubecfDetection,
    out: *mut i64,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        let a = &(&*h).inner.a;
        let v = [
            to_i64(&a.0[0], "a1")?,
            to_i64(&a.0[1], "a2")?,
            to_i64(&a.0[2], "a3")?,
        ];
        ptr::copy_nonoverlapping(v.as_ptr(), out, 3);
        Ok(())
    })
}

/// The shortest vector as text `(a1,a2,a3)`, freed with
/// [`cubecf_string_free`]. Works at any size.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_vector_text(
    h: *const CubecfDetection,
    out: *mut *mut c_char,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        *out = to_c_string((&*h).inner.a.to_string());
        Ok(())
    })
}

/// The recovered fraction as decimal strings, freed with [`cubecf_string_free`].
///
/// # Safety
/// `h` must be a live handle; `p` and `q` valid for writing one pointer each.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_fraction(
    h: *const CubecfDetection,
    p: *mut *mut c_char,
    q: *mut *mut c_char,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(p, "p")?;
        check_ptr(q, "q")?;
        *p = to_c_string((&*h).inner.p.to_string());
        *q = to_c_string((&*h).inner.q.to_string());
        Ok(())
    })
}

/// Scalar summary of a detection.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CubecfDetectionSummary {
    pub j: i64,
    /// `ρ^{−j/4}|a|`.
    pub a_len: f64,
    /// `Δ = 3ρ^{−j/4}|a|`.
    pub big_delta: f64,
    pub proven: bool,
    pub has_bound: bool,
    /// `⌊2/Δ² − 2⌋`, meaningful when `has_bound` is set.
    pub bound: u64,
    pub trace_len: usize,
}

/// # Safety
/// `h` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_summary(
    h: *const CubecfDetection,
    out: *mut CubecfDetectionSummary,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        let d = &(&*h).inner;
        let bound = match &d.b_bound {
            Some(b) => Some(u64::try_from(b).map_err(|_| {
                fail(
                    CubecfStatus::OutOfRange,
                    format!("bound {b} exceeds 64 bits"),
                )
            })?),
            None => None,
        };
        *out = CubecfDetectionSummary {
            j: d.j,
            a_len: d.len.to_f64(),
            big_delta: d.big_delta.to_f64(),
            proven: d.proven,
            has_bound: bound.is_some(),
            bound: bound.unwrap_or(0),
            trace_len: d.trace.steps.len(),
        };
        Ok(())
    })
}

/// Row `i` of the reduction trace.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_detection_trace_row(
    h: *const CubecfDetection,
    i: usize,
    out: *mut CubecfGaussRow,
) -> CubecfStatus {
    guard(|| {
        check_ptr(h, "handle")?;
        check_ptr(out, "out")?;
        let s = (&*h)
            .inner
            .trace
            .steps
            .get(i)
            .ok_or_else(|| fail(CubecfStatus::OutOfRange, format!("no trace row {i}")))?;
        let v3 = |v: &cubecf::IntVec3| -> Result<[i64; 3], CubecfStatus> {
            Ok([
                to_i64(&v.0[0], "z")?,
                to_i64(&v.0[1], "z")?,
                to_i64(&v.0[2], "z")?,
            ])
        };
        *out = CubecfGaussRow {
            z1: v3(&s.z1)?,
            z2: v3(&s.z2)?,
            norm2: to_i64(&s.norm2, "norm2")?,
            dot: to_i64(&s.dot, "dot")?,
            k: to_i64(&s.k, "k")?,
        };
        Ok(())
    })
}

/// Spectral and bound constants, rounded to double.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CubecfConstants {
    pub theta_deg: f64,
    pub m: f64,
    pub rho: f64,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub x_prime: f64,
    pub x_prime_low: f64,
    pub h_x_prime: f64,
    pub t3_bound: f64,
    pub a2_bound: f64,
}

/// A `precision` of 0 selects the default.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_constants(
    precision_digits: u32,
    out: *mut CubecfConstants,
) -> CubecfStatus {
    guard(|| {
        check_ptr(out, "out")?;
        let ctx = Context::new(precision(precision_digits)).map_err(from_error)?;
        let (e, c) = (&ctx.eig, &ctx.consts);
        *out = CubecfConstants {
            theta_deg: e.theta_degrees().to_f64(),
            m: e.m.to_f64(),
            rho: e.rho.to_f64(),
            a: c.a.to_f64(),
            b: c.b.to_f64(),
            x0: c.x0.to_f64(),
            x_prime: c.x_prime.to_f64(),
            x_prime_low: c.x_prime_low.to_f64(),
            h_x_prime: c.h_at_x_prime.to_f64(),
            t3_bound: c.t3_bound.to_f64(),
            a2_bound: c.a2_bound.to_f64(),
        };
        Ok(())
    })
}

/// Gauss–Kuzmin probability of the value `k >= 1`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_kuzmin_prob(k: u64, out: *mut f64) -> CubecfStatus {
    guard(|| {
        check_ptr(out, "out")?;
        *out = kuzmin_prob(k).map_err(from_error)?;
        Ok(())
    })
}

/// Upper tail of the χ² distribution.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_chi2_sf(x2: f64, df: usize, out: *mut f64) -> CubecfStatus {
    guard(|| {
        check_ptr(out, "out")?;
        *out = chi2_sf(x2, df).map_err(from_error)?;
        Ok(())
    })
}

/// χ² test of counts for the cells `{1}, …, {R−1}, {≥R}`, `R = len >= 2`.
///
/// # Safety
/// `observed` must point to `len` readable values; `x2` and `p_value` must
/// be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cubecf_chi_square(
    observed: *const u64,
    len: usize,
    x2: *mut f64,
    p_value: *mut f64,
) -> CubecfStatus {
    guard(|| {
        check_ptr(observed, "observed")?;
        check_ptr(x2, "x2")?;
        check_ptr(p_value, "p_value")?;
        let obs = std::slice::from_raw_parts(observed, len).to_vec();
        let counts = GroupedCounts::from_observed(obs).map_err(from_error)?;
        let r = chi_square(&counts).map_err(from_error)?;
        *x2 = r.x2;
        *p_value = r.p_value;
        Ok(())
    })
}
