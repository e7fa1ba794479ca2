//! C interface to `regpolar`.
//!
//! Operators cross the boundary as opaque [`RpOperator`] handles built from
//! interleaved `(re, im)` doubles. Every fallible call returns an
//! [`RpStatus`]; the message of the last failure on the calling thread is
//! available from [`rp_last_error`]. Handles and strings returned by the
//! library are released with [`rp_operator_free`] and [`rp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use regpolar::hilbmod::OperatorMatrix;
use regpolar::matalg::{BlockProfile, CMat};
use regpolar::polar::{
    generalized_inverse, polar_decompose, verify_thm31, InverseDatum, Operator, PolarDecomposition,
};
use regpolar::regular::{btransform, inverse_btransform};
use regpolar::{Error, Tolerances};

/// Status code of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Sizes, ranks or tolerances are out of range.
    InvalidArgument = 2,
    /// Data length or block shapes disagree with the profile.
    ShapeMismatch = 3,
    /// A numerical routine failed, e.g. a singular defect `1 - F*F`.
    Computation = 4,
    /// The library panicked; the handle arguments are unchanged.
    Panic = 5,
}

/// A bounded operator `A^k → A^m` over `A = ⊕ M_n(ℂ)`.
pub struct RpOperator(OperatorMatrix);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpTolerances {
    /// Identity residual tolerance.
    pub identity: f64,
    /// Relative rank cut-off for singular values.
    pub rank: f64,
}

/// Verdicts of the polar / complement / generalized-inverse check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpVerdicts {
    pub polar_exists: bool,
    pub complemented: bool,
    pub inverse_exists: bool,
    pub max_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(RpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ProfileMismatch { .. } | Error::ShapeMismatch(_) | Error::NotSquare { .. } => {
                RpStatus::ShapeMismatch
            }
            Error::InvalidProfile(_) | Error::NonFinite(_) => RpStatus::InvalidArgument,
            _ => RpStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: RpStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RpStatus::Panic
        }
    }
}

fn tolerances(tol: *const RpTolerances) -> Result<Tolerances, Failure> {
    let mut t = Tolerances::default();
    // SAFETY: the caller passes null or a valid pointer.
    if let Some(given) = unsafe { tol.as_ref() } {
        for (name, v) in [("identity", given.identity), ("rank", given.rank)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(fail(
                    RpStatus::InvalidArgument,
                    format!("{name} tolerance must be positive"),
                ));
            }
        }
        t.identity = given.identity;
        t.rank = given.rank;
    }
    Ok(t)
}

fn operator<'a>(op: *const RpOperator) -> Result<&'a OperatorMatrix, Failure> {
    // SAFETY: the caller passes null or a live handle from this library.
    unsafe { op.as_ref() }
        .map(|o| &o.0)
        .ok_or_else(|| fail(RpStatus::NullArgument, "operator handle is null"))
}

fn emit(out: *mut *mut RpOperator, m: OperatorMatrix) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(RpStatus::NullArgument, "output pointer is null"));
    }
    // SAFETY: checked non-null; the caller owns the slot.
    unsafe { *out = Box::into_raw(Box::new(RpOperator(m))) };
    Ok(())
}

fn check_outputs(outs: &[bool]) -> Result<(), Failure> {
    if outs.iter().any(|&null| null) {
        return Err(fail(RpStatus::NullArgument, "output pointer is null"));
    }
    Ok(())
}

/// Default tolerances: identity `1e-8`, rank `1e-10`.
#[no_mangle]
pub extern "C" fn rp_tolerances_default() -> RpTolerances {
    let t = Tolerances::default();
    RpTolerances {
        identity: t.identity,
        rank: t.rank,
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an operator from `num_blocks` block sizes and interleaved
/// `(re, im)` data: blocks in profile order, each a row-major
/// `(domain_rank·n) × (codomain_rank·n)` complex matrix.
///
/// # Safety
/// `profile` must point to `num_blocks` sizes and `data` to `data_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_new(
    profile: *const usize,
    num_blocks: usize,
    domain_rank: usize,
    codomain_rank: usize,
    data: *const f64,
    data_len: usize,
    out: *mut *mut RpOperator,
) -> RpStatus {
    guard(|| {
        if profile.is_null() || (data.is_null() && data_len > 0) {
            return Err(fail(RpStatus::NullArgument, "profile or data is null"));
        }
        // SAFETY: lengths are the caller's contract.
        let sizes = unsafe { std::slice::from_raw_parts(profile, num_blocks) }.to_vec();
        let data: &[f64] = if data_len == 0 {
            &[]
        } else {
            unsafe { std::slice::from_raw_parts(data, data_len) }
        };
        let profile = BlockProfile::new(sizes)?;
        let expected: usize = profile
            .sizes()
            .iter()
            .map(|&n| 2 * domain_rank * n * codomain_rank * n)
            .sum();
        if data.len() != expected {
            return Err(fail(
                RpStatus::ShapeMismatch,
                format!("expected {expected} doubles, got {}", data.len()),
            ));
        }
        let mut offset = 0;
        let blocks = profile
            .sizes()
            .iter()
            .map(|&n| {
                let (rows, cols) = (domain_rank * n, codomain_rank * n);
                let chunk = &data[offset..offset + 2 * rows * cols];
                offset += chunk.len();
                CMat::from_fn(rows, cols, |r, c| {
                    let i = 2 * (r * cols + c);
                    regpolar::matalg::C64::new(chunk[i], chunk[i + 1])
                })
            })
            .collect();
        let m = OperatorMatrix::from_blocks(profile, domain_rank, codomain_rank, blocks)?;
        emit(out, m)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `op` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_free(op: *mut RpOperator) {
    if !op.is_null() {
        drop(unsafe { Box::from_raw(op) });
    }
}

/// Domain module rank `k`, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_domain_rank(op: *const RpOperator) -> usize {
    operator(op).map_or(0, |m| m.domain_rank())
}

/// Codomain module rank `m`, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_codomain_rank(op: *const RpOperator) -> usize {
    operator(op).map_or(0, |m| m.codomain_rank())
}

/// Number of doubles written by [`rp_operator_copy_data`].
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_data_len(op: *const RpOperator) -> usize {
    operator(op).map_or(0, |m| m.blocks().iter().map(|b| 2 * b.len()).sum())
}

/// Operator norm (largest singular value over blocks), NaN for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_norm(op: *const RpOperator) -> f64 {
    operator(op).map_or(f64::NAN, |m| m.norm())
}

/// Writes the interleaved data in the layout accepted by [`rp_operator_new`].
///
/// # Safety
/// `op` must be a live handle and `buf` must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_operator_copy_data(
    op: *const RpOperator,
    buf: *mut f64,
    buf_len: usize,
) -> RpStatus {
    guard(|| {
        let m = operator(op)?;
        let need: usize = m.blocks().iter().map(|b| 2 * b.len()).sum();
        if buf.is_null() {
            return Err(fail(RpStatus::NullArgument, "buffer is null"));
        }
        if buf_len < need {
            return Err(fail(
                RpStatus::InvalidArgument,
                format!("buffer holds {buf_len}, need {need}"),
            ));
        }
        // SAFETY: bounds checked above.
        let out = unsafe { std::slice::from_raw_parts_mut(buf, need) };
        let mut i = 0;
        for b in m.blocks() {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out[i] = b[(r, c)].re;
                    out[i + 1] = b[(r, c)].im;
                    i += 2;
                }
            }
        }
        Ok(())
    })
}

/// Polar decomposition `t = V|t|`; writes new handles for `V` and `|t|`.
///
/// # Safety
/// `op` must be a live handle, `tol` null or valid, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rp_polar(
    op: *const RpOperator,
    tol: *const RpTolerances,
    out_v: *mut *mut RpOperator,
    out_abs: *mut *mut RpOperator,
) -> RpStatus {
    guard(|| {
        let t = operator(op)?;
        let tol = tolerances(tol)?;
        check_outputs(&[out_v.is_null(), out_abs.is_null()])?;
        let PolarDecomposition::Matrix(p) = polar_decompose(&Operator::from(t.clone()), &tol)?
        else {
            unreachable!("matrix input");
        };
        emit(out_v, p.v)?;
        emit(out_abs, p.abs_t)
    })
}

/// Moore-Penrose generalized inverse `s`.
///
/// # Safety
/// `op` must be a live handle, `tol` null or valid, `out_s` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_pinv(
    op: *const RpOperator,
    tol: *const RpTolerances,
    out_s: *mut *mut RpOperator,
) -> RpStatus {
    guard(|| {
        let t = operator(op)?;
        let tol = tolerances(tol)?;
        check_outputs(&[out_s.is_null()])?;
        let InverseDatum::Matrix(s) = generalized_inverse(&Operator::from(t.clone()), &tol)?.s
        else {
            unreachable!("matrix input");
        };
        emit(out_s, s)
    })
}

/// Bounded transform `F_t = t(1 + t*t)^{-1/2}`.
///
/// # Safety
/// `op` must be a live handle, `tol` null or valid, `out_f` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_btransform(
    op: *const RpOperator,
    tol: *const RpTolerances,
    out_f: *mut *mut RpOperator,
) -> RpStatus {
    guard(|| {
        let t = operator(op)?;
        let tol = tolerances(tol)?;
        check_outputs(&[out_f.is_null()])?;
        emit(out_f, btransform(&t.clone().into(), &tol)?)
    })
}

/// Inverse transform `t = F(1 - F*F)^{-1/2}`; fails with
/// [`RpStatus::Computation`] when `1 - F*F` is singular.
///
/// # Safety
/// `f` must be a live handle, `tol` null or valid, `out_t` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_inverse_btransform(
    f: *const RpOperator,
    tol: *const RpTolerances,
    out_t: *mut *mut RpOperator,
) -> RpStatus {
    guard(|| {
        let f = operator(f)?;
        let tol = tolerances(tol)?;
        check_outputs(&[out_t.is_null()])?;
        emit(out_t, inverse_btransform(f, &tol)?.explicit(&tol)?)
    })
}

/// Decides the three equivalent conditions and reports the largest identity residual.
///
/// # Safety
/// `op` must be a live handle, `tol` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_verify(
    op: *const RpOperator,
    tol: *const RpTolerances,
    out: *mut RpVerdicts,
) -> RpStatus {
    guard(|| {
        let t = operator(op)?;
        let tol = tolerances(tol)?;
        check_outputs(&[out.is_null()])?;
        let r = verify_thm31(&Operator::from(t.clone()), &tol)?;
        // SAFETY: checked non-null.
        unsafe {
            *out = RpVerdicts {
                polar_exists: r.cond_i,
                complemented: r.cond_ii,
                inverse_exists: r.cond_iii,
                max_residual: r.max_residual(),
            }
        };
        Ok(())
    })
}

/// Runs a command-line command (`"polar"`, `"verify-thm31"`, ...) on a
/// problem file given as a json string and stores the json report in
/// `*out_json`, to be released with [`rp_string_free`]. `tol <= 0` keeps the
/// default or file tolerance.
///
/// Returns the command-line exit code (0 analysis completed, 2 input or
/// computation error), or -1 when an argument is null or not UTF-8.
///
/// # Safety
/// `command` and `problem_json` must be null-terminated strings; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_run_json(
    command: *const c_char,
    problem_json: *const c_char,
    tol: f64,
    out_json: *mut *mut c_char,
) -> i32 {
    let result = catch_unwind(|| -> Result<i32, String> {
        if command.is_null() || problem_json.is_null() || out_json.is_null() {
            return Err("null argument".into());
        }
        // SAFETY: null-terminated per contract.
        let command = unsafe { CStr::from_ptr(command) }
            .to_str()
            .map_err(|e| e.to_string())?;
        let problem = unsafe { CStr::from_ptr(problem_json) }
            .to_str()
            .map_err(|e| e.to_string())?;
        let tol = (tol > 0.0).then_some(tol);
        let (json, code) = regpolar::cli::run_problem_json(command, problem, tol);
        let s = CString::new(json).map_err(|e| e.to_string())?;
        // SAFETY: checked non-null.
        unsafe { *out_json = s.into_raw() };
        Ok(code)
    });
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(msg)) => {
            set_error(msg);
            -1
        }
        Err(_) => {
            set_error("internal panic");
            -1
        }
    }
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from [`rp_run_json`] that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn rp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
