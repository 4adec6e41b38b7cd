//! C interface to `pentadiag`.
//!
//! Parameter sets and MA(1) points are opaque handles created by
//! `pd_params_new` / `pd_ma1_new` and released with the matching `_free`.
//! Every fallible call returns a [`PdStatus`]; on failure a message is
//! available from [`pd_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use pentadiag::definiteness::{classify_region, RegionTag};
use pentadiag::determinant::{det_d_closed, det_d_recurrence, CaseId, DetResult};
use pentadiag::error::Error;
use pentadiag::ma1::{l_n, limit_l, CumulantValue, Ma1Point};
use pentadiag::matrix::PentaParams;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    OrderTooSmall = 4,
    NegativeDiagonal = 5,
    RequiresREqualPMinusS = 6,
    NonInvertible = 7,
    Hypothesis = 8,
    Quadrature = 9,
    Overflow = 10,
    Internal = 11,
    Panic = 12,
}

/// Closed-form case, named as in [`CaseId`].
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdCase {
    NONE = -1,
    GEN_DISTINCT = 0,
    Q2_4S_P_GT_6S = 1,
    Q2_4S_P_LT_6S = 2,
    Q2_QUARTER_P_NE_6S = 3,
    ALL_EQUAL_P_6S = 4,
    QZERO_GEN = 5,
    QZERO_P_2S = 6,
    QZERO_P_NEG2S = 7,
    SZERO_GEN = 8,
    SZERO_P2_4Q2 = 9,
    DIAG = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdRegion {
    D1 = 1,
    D2 = 2,
    D3 = 3,
    D4 = 4,
    D0 = 0,
    Outside = -1,
}

/// Determinant as `sign * exp(log_abs)`, also split as
/// `mantissa10 * 10^exponent10`. A zero determinant has `sign == 0`,
/// `log_abs == -inf` and a zero mantissa.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdDet {
    pub sign: i32,
    pub log_abs: f64,
    pub mantissa10: f64,
    pub exponent10: i64,
    pub case_id: PdCase,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdClassification {
    pub region: PdRegion,
    /// Null eigenvalue witness for `D0`, zero otherwise.
    pub witness_k: u64,
    pub witness_n: u64,
}

/// Opaque parameter set `(p, q, r, s)`.
pub struct PdParams(PentaParams);

/// Opaque MA(1) point `(phi, lambda1, lambda2)`.
pub struct PdMa1Point(Ma1Point);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PdStatus {
    match err {
        Error::NonFinite { .. } => PdStatus::NonFinite,
        Error::OrderTooSmall { .. } => PdStatus::OrderTooSmall,
        Error::NegativeDiagonal { .. } => PdStatus::NegativeDiagonal,
        Error::RequiresRpEqualPMinusS { .. } => PdStatus::RequiresREqualPMinusS,
        Error::NonInvertible { .. } => PdStatus::NonInvertible,
        Error::InvalidArgument(_) => PdStatus::InvalidArgument,
        Error::Hypothesis(_) => PdStatus::Hypothesis,
        Error::Quadrature(_) => PdStatus::Quadrature,
        Error::ExpOverflow { .. } => PdStatus::Overflow,
        Error::Consistency(_) => PdStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), (PdStatus, String)>>(f: F) -> PdStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside pentadiag".to_string());
            PdStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PdStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PdStatus, String) {
    (PdStatus::NullPointer, format!("`{what}` is null"))
}

/// # Safety
/// `p` must be null or valid for reads of `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (PdStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, what: &str, value: T) -> Result<(), (PdStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn order(n: u64) -> Result<usize, (PdStatus, String)> {
    usize::try_from(n).map_err(|_| (PdStatus::InvalidArgument, format!("order {n} does not fit in usize")))
}

fn case_code(case: Option<CaseId>) -> PdCase {
    match case {
        None => PdCase::NONE,
        Some(CaseId::GEN_DISTINCT) => PdCase::GEN_DISTINCT,
        Some(CaseId::Q2_4S_P_GT_6S) => PdCase::Q2_4S_P_GT_6S,
        Some(CaseId::Q2_4S_P_LT_6S) => PdCase::Q2_4S_P_LT_6S,
        Some(CaseId::Q2_QUARTER_P_NE_6S) => PdCase::Q2_QUARTER_P_NE_6S,
        Some(CaseId::ALL_EQUAL_P_6S) => PdCase::ALL_EQUAL_P_6S,
        Some(CaseId::QZERO_GEN) => PdCase::QZERO_GEN,
        Some(CaseId::QZERO_P_2S) => PdCase::QZERO_P_2S,
        Some(CaseId::QZERO_P_NEG2S) => PdCase::QZERO_P_NEG2S,
        Some(CaseId::SZERO_GEN) => PdCase::SZERO_GEN,
        Some(CaseId::SZERO_P2_4Q2) => PdCase::SZERO_P2_4Q2,
        Some(CaseId::DIAG) => PdCase::DIAG,
    }
}

fn det_out(d: DetResult) -> PdDet {
    let (mantissa10, exponent10) = d.value.mantissa_exponent10().unwrap_or((0.0, 0));
    PdDet {
        sign: d.value.sign() as i32,
        log_abs: d.value.log_abs(),
        mantissa10,
        exponent10,
        case_id: case_code(d.case_id),
    }
}

/// Positive infinity stands for a divergent cumulant.
fn cumulant_out(v: CumulantValue) -> f64 {
    v.value().unwrap_or(f64::INFINITY)
}

/// Creates a parameter handle. All four values must be finite.
///
/// # Safety
/// `out` must be valid for writes of one pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_params_new(p: f64, q: f64, r: f64, s: f64, out: *mut *mut PdParams) -> PdStatus {
    guard(|| {
        let params = PentaParams::new(p, q, r, s).map_err(lib_err)?;
        write(out, "out", Box::into_raw(Box::new(PdParams(params))))
    })
}

/// # Safety
/// `params` must be null or a handle from [`pd_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_params_free(params: *mut PdParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// `det D_n` by the closed form, for any `n >= 3`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_det_closed(params: *const PdParams, n: u64, out: *mut PdDet) -> PdStatus {
    guard(|| {
        let pr = deref(params, "params")?;
        let d = det_d_closed(&pr.0, order(n)?).map_err(lib_err)?;
        write(out, "out", det_out(d))
    })
}

/// `det D_n` by the order-five recurrence, linear in `n`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_det_recurrence(params: *const PdParams, n: u64, out: *mut PdDet) -> PdStatus {
    guard(|| {
        let pr = deref(params, "params")?;
        let n = order(n)?;
        if n < 3 {
            return Err(lib_err(Error::OrderTooSmall { min: 3, got: n as u64 }));
        }
        write(out, "out", det_out(det_d_recurrence(&pr.0, n)))
    })
}

/// Definiteness region of the parameter set; requires `p >= 0`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_classify(params: *const PdParams, out: *mut PdClassification) -> PdStatus {
    guard(|| {
        let pr = deref(params, "params")?;
        let label = classify_region(&pr.0).map_err(lib_err)?;
        let region = match label.tag {
            RegionTag::D1 => PdRegion::D1,
            RegionTag::D2 => PdRegion::D2,
            RegionTag::D3 => PdRegion::D3,
            RegionTag::D4 => PdRegion::D4,
            RegionTag::D0 => PdRegion::D0,
            RegionTag::Outside => PdRegion::Outside,
        };
        let (witness_k, witness_n) = label.witness.map_or((0, 0), |w| (w.k, w.n));
        write(out, "out", PdClassification { region, witness_k, witness_n })
    })
}

/// Creates an MA(1) point handle; requires `|phi| < 1`.
///
/// # Safety
/// `out` must be valid for writes of one pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_ma1_new(phi: f64, lambda1: f64, lambda2: f64, out: *mut *mut PdMa1Point) -> PdStatus {
    guard(|| {
        let pt = Ma1Point::new(phi, lambda1, lambda2).map_err(lib_err)?;
        write(out, "out", Box::into_raw(Box::new(PdMa1Point(pt))))
    })
}

/// # Safety
/// `point` must be null or a handle from [`pd_ma1_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_ma1_free(point: *mut PdMa1Point) {
    if !point.is_null() {
        drop(Box::from_raw(point));
    }
}

/// Finite-sample cumulant `L_n`, `n >= 2`. Writes `+inf` when it diverges.
///
/// # Safety
/// `point` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_ma1_l_n(point: *const PdMa1Point, n: u64, out: *mut f64) -> PdStatus {
    guard(|| {
        let pt = deref(point, "point")?;
        let v = l_n(&pt.0, order(n)?).map_err(lib_err)?;
        write(out, "out", cumulant_out(v))
    })
}

/// Limit of `L_n` as `n -> inf`. Writes `+inf` outside the domain.
///
/// # Safety
/// `point` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_ma1_limit(point: *const PdMa1Point, out: *mut f64) -> PdStatus {
    guard(|| {
        let pt = deref(point, "point")?;
        let v = limit_l(&pt.0).map_err(lib_err)?;
        write(out, "out", cumulant_out(v))
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pd_status_str(status: PdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PdStatus::Ok => c"ok",
        PdStatus::NullPointer => c"null pointer",
        PdStatus::InvalidArgument => c"invalid argument",
        PdStatus::NonFinite => c"non-finite parameter",
        PdStatus::OrderTooSmall => c"matrix order too small",
        PdStatus::NegativeDiagonal => c"negative diagonal",
        PdStatus::RequiresREqualPMinusS => c"requires r = p - s",
        PdStatus::NonInvertible => c"MA(1) coefficient not invertible",
        PdStatus::Hypothesis => c"hypothesis violated",
        PdStatus::Quadrature => c"quadrature failed",
        PdStatus::Overflow => c"overflow",
        PdStatus::Internal => c"internal consistency failure",
        PdStatus::Panic => c"panic",
    };
    s.as_ptr()
}
