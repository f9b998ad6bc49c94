//! C interface to `zstar-core`.
//!
//! Values and certificates live behind opaque handles that the caller frees
//! with the matching `*_free` function. Every entry point returns a
//! [`ZstarStatus`]; on failure the message is kept per thread and can be
//! read with [`zstar_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zstar_core::cantor_hall::{decompose, DecompositionCertificate, Operation};
use zstar_core::cli::parse_rational;
use zstar_core::{eval_parts, expand, Enclosure, EvalConfig, ExpandOptions, ExpansionStatus, Real, Tail, ZstarError};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZstarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidIndex = 3,
    Divergent = 4,
    OutOfDomain = 5,
    BelowRange = 6,
    PrecisionInsufficient = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Decomposition operation.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZstarOp {
    Sum = 0,
    Product = 1,
    Difference = 2,
    Quotient = 3,
}

/// How an expansion ended.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZstarExpansionEnd {
    Truncated = 0,
    Exact = 1,
    BoundaryAmbiguous = 2,
}

/// Opaque certified value.
pub struct ZstarEnclosure(Enclosure);

/// Opaque decomposition certificate.
pub struct ZstarCertificate(DecompositionCertificate);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &ZstarError) -> ZstarStatus {
    match e {
        ZstarError::InvalidIndex(_) | ZstarError::NotInDomain(_) | ZstarError::InvalidNode(_) => {
            ZstarStatus::InvalidIndex
        }
        ZstarError::DivergentValue(_) => ZstarStatus::Divergent,
        ZstarError::OutOfDomain(_) | ZstarError::OutOfRange(_) | ZstarError::UnboundedFamily(_) => {
            ZstarStatus::OutOfDomain
        }
        ZstarError::BelowRange(_) => ZstarStatus::BelowRange,
        ZstarError::PrecisionInsufficient(_) => ZstarStatus::PrecisionInsufficient,
        ZstarError::Parse(_) => ZstarStatus::InvalidArgument,
        _ => ZstarStatus::Internal,
    }
}

fn fail(status: ZstarStatus, msg: impl Into<String>) -> ZstarStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), ZstarStatus>) -> ZstarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ZstarStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(ZstarStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: zstar_core::Result<T>) -> Result<T, ZstarStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, ZstarStatus> {
    if s.is_null() {
        return Err(fail(ZstarStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ZstarStatus::InvalidArgument, "string is not UTF-8"))
}

/// Copies `s` plus a NUL into `buf`; `needed` receives the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), ZstarStatus> {
    if !needed.is_null() {
        *needed = s.len() + 1;
    }
    if buf.is_null() || cap < s.len() + 1 {
        return Err(fail(ZstarStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message (empty after a success).
///
/// # Safety
/// `buf` must point to `cap` writable bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn zstar_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> ZstarStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match write_str(&msg, buf, cap, needed) {
        Ok(()) => ZstarStatus::Ok,
        Err(s) => s,
    }
}

/// Evaluates `zeta*(digits, tail)`; `tail = 0` means no tail, otherwise
/// the constant tail `{tail}^inf`. A divergent value yields an enclosure
/// that reports infinite.
///
/// # Safety
/// `digits` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_eval(
    digits: *const u32,
    len: usize,
    tail: u32,
    precision: u32,
    truncation: u64,
    out: *mut *mut ZstarEnclosure,
) -> ZstarStatus {
    guard(|| {
        if out.is_null() || (digits.is_null() && len > 0) {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        *out = ptr::null_mut();
        if precision < 16 || truncation == 0 {
            return Err(fail(
                ZstarStatus::InvalidArgument,
                "precision must be >= 16 and truncation > 0",
            ));
        }
        let d = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(digits, len)
        };
        let t = if tail == 0 { Tail::NoTail } else { Tail::ConstTail(tail) };
        if d.is_empty() && tail == 0 {
            return Err(fail(ZstarStatus::InvalidIndex, "empty index"));
        }
        let v = match eval_parts(d, t, &EvalConfig::new(precision, truncation)) {
            Err(ZstarError::DivergentValue(_)) => Enclosure::infinite(precision),
            r => lift(r)?,
        };
        *out = Box::into_raw(Box::new(ZstarEnclosure(v)));
        Ok(())
    })
}

/// Midpoint and radius rounded to doubles (radius rounded up).
///
/// # Safety
/// `h` must come from this library; `mid` and `rad` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_enclosure_bounds(h: *const ZstarEnclosure, mid: *mut f64, rad: *mut f64) -> ZstarStatus {
    guard(|| {
        if h.is_null() || mid.is_null() || rad.is_null() {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        let e = &(*h).0;
        if e.is_infinite() {
            *mid = f64::INFINITY;
            *rad = f64::INFINITY;
        } else {
            *mid = e.mid().to_f64();
            *rad = e.rad().to_f64_round(rug::float::Round::Up);
        }
        Ok(())
    })
}

/// 1 if the value diverges, 0 otherwise, -1 for a null handle.
///
/// # Safety
/// `h` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn zstar_enclosure_is_infinite(h: *const ZstarEnclosure) -> c_int {
    match h.as_ref() {
        None => -1,
        Some(e) => e.0.is_infinite() as c_int,
    }
}

/// Decimal rendering `mid +/- rad` with `digits` significant digits.
///
/// # Safety
/// `h` from this library; `buf` must hold `cap` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn zstar_enclosure_format(
    h: *const ZstarEnclosure,
    digits: u32,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> ZstarStatus {
    guard(|| {
        let e = h
            .as_ref()
            .ok_or_else(|| fail(ZstarStatus::NullPointer, "null handle"))?;
        write_str(&format!("{:.*}", digits.max(1) as usize, e.0), buf, cap, needed)
    })
}

/// # Safety
/// `h` must be null or come from [`zstar_eval`], and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zstar_enclosure_free(h: *mut ZstarEnclosure) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Digit expansion of the decimal or fraction `x`. Up to `cap` digits are
/// written to `digits`; `written` receives the number of digits produced.
///
/// # Safety
/// `x` is a NUL-terminated string; `digits` holds `cap` values; `written`
/// and `end` are writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_expand(
    x: *const c_char,
    depth: usize,
    precision: u32,
    digits: *mut u32,
    cap: usize,
    written: *mut usize,
    end: *mut ZstarExpansionEnd,
) -> ZstarStatus {
    guard(|| {
        if digits.is_null() || written.is_null() || end.is_null() {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        let x = lift(parse_rational(c_str(x)?))?;
        let r = lift(expand(
            &Real::Exact(x),
            depth,
            ExpandOptions {
                precision,
                ..ExpandOptions::default()
            },
        ))?;
        *written = r.digits.len();
        *end = match r.status {
            ExpansionStatus::Truncated => ZstarExpansionEnd::Truncated,
            ExpansionStatus::Exact(_) => ZstarExpansionEnd::Exact,
            ExpansionStatus::BoundaryAmbiguous(_) => ZstarExpansionEnd::BoundaryAmbiguous,
        };
        if r.digits.len() > cap {
            return Err(fail(
                ZstarStatus::BufferTooSmall,
                format!("need {} digits", r.digits.len()),
            ));
        }
        ptr::copy_nonoverlapping(r.digits.as_ptr(), digits, r.digits.len());
        Ok(())
    })
}

/// Certificate for `x = v1 op v2` with `v1, v2` in `eta(D_q)`.
///
/// # Safety
/// `x` is a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_decompose(
    op: ZstarOp,
    x: *const c_char,
    q: u32,
    tolerance: f64,
    precision: u32,
    out: *mut *mut ZstarCertificate,
) -> ZstarStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        *out = ptr::null_mut();
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(fail(ZstarStatus::InvalidArgument, "tolerance must be positive"));
        }
        let op = match op {
            ZstarOp::Sum => Operation::Sum,
            ZstarOp::Product => Operation::Product,
            ZstarOp::Difference => Operation::Difference,
            ZstarOp::Quotient => Operation::Quotient,
        };
        let x = lift(parse_rational(c_str(x)?))?;
        let c = lift(decompose(op, &Real::Exact(x), q, tolerance, precision))?;
        *out = Box::into_raw(Box::new(ZstarCertificate(c)));
        Ok(())
    })
}

/// Upper bound on `|v1 op v2 - x|`.
///
/// # Safety
/// `h` from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_certificate_residual(h: *const ZstarCertificate, out: *mut f64) -> ZstarStatus {
    guard(|| {
        let c = h
            .as_ref()
            .ok_or_else(|| fail(ZstarStatus::NullPointer, "null handle"))?;
        if out.is_null() {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        *out = c.0.residual_bound;
        Ok(())
    })
}

/// Re-evaluates both components at doubled precision; `valid` receives 1
/// if the target stays within the residual bound.
///
/// # Safety
/// `h` from this library; `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn zstar_certificate_validate(h: *const ZstarCertificate, valid: *mut c_int) -> ZstarStatus {
    guard(|| {
        let c = h
            .as_ref()
            .ok_or_else(|| fail(ZstarStatus::NullPointer, "null handle"))?;
        if valid.is_null() {
            return Err(fail(ZstarStatus::NullPointer, "null argument"));
        }
        *valid = lift(c.0.validate())? as c_int;
        Ok(())
    })
}

/// The certificate as a JSON object.
///
/// # Safety
/// `h` from this library; `buf` holds `cap` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn zstar_certificate_json(
    h: *const ZstarCertificate,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> ZstarStatus {
    guard(|| {
        let c = h
            .as_ref()
            .ok_or_else(|| fail(ZstarStatus::NullPointer, "null handle"))?;
        let s = serde_json::to_string(&c.0).map_err(|e| fail(ZstarStatus::Internal, e.to_string()))?;
        write_str(&s, buf, cap, needed)
    })
}

/// # Safety
/// `h` must be null or come from [`zstar_decompose`], and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zstar_certificate_free(h: *mut ZstarCertificate) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zstar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
