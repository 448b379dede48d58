//! C ABI for covqec.
//!
//! Every fallible function returns a [`CovqecStatus`]; on failure the
//! message is available from [`covqec_last_error`] on the same thread.
//! Objects are opaque handles owned by the caller and released with the
//! matching `_free` function. Panics never cross the boundary.

use covqec::codes::{U1Code, U1CodeSpec};
use covqec::container::{decode_u1_code, encode_u1_code, read_file, write_atomic};
use covqec::erasure::{sampled_code_errors, u1_choi_symmetry_term, u1_worst_symmetry_term, CodeRef, ErasurePattern, ZetaStrategy};
use covqec::minentropy::{hmin_sdp, u1_kappa_bounds};
use covqec::symmetry::{schur_decomposition, SchurDecomposition};
use covqec::tensor::CMat;
use covqec::Error;
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovqecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionCap = 3,
    Shape = 4,
    InvalidState = 5,
    Numerical = 6,
    Container = 7,
    Io = 8,
    Panic = 9,
}

/// A sampled U(1)-covariant code.
pub struct CovqecU1Code(U1Code);

/// A Schur–Weyl decomposition of `(C^d)^{⊗n}`.
pub struct CovqecSchur(SchurDecomposition);

/// Distances of the averaged U(1) code state from the product reference.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CovqecSymmetryTerm {
    pub fidelity: f64,
    pub purified: f64,
    pub trace_distance: f64,
}

/// Error bounds of one sampled code with the first `t` qubits erased.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CovqecErrorReport {
    pub eps_choi_upper: f64,
    pub decoupling_term: f64,
    pub decoupling_trace_norm: f64,
    pub symmetry_term: f64,
    pub eps_worst_upper: f64,
    pub choi_lower_bound: f64,
    pub worst_lower_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CovqecStatus {
    match e {
        Error::DimensionCap { .. } | Error::GroupCap { .. } => CovqecStatus::DimensionCap,
        Error::Shape(_) | Error::Factorization(_) => CovqecStatus::Shape,
        Error::InvalidState(_) => CovqecStatus::InvalidState,
        Error::Numerical(_) | Error::Verification(_) => CovqecStatus::Numerical,
        Error::Container(_) => CovqecStatus::Container,
        Error::Io(_) => CovqecStatus::Io,
        Error::InvalidArgument(_) | Error::Config(_) => CovqecStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and panics for [`covqec_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (CovqecStatus, String)>) -> CovqecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CovqecStatus::Ok,
        Ok(Err((status, msg))) => {
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
            CovqecStatus::Panic
        }
    }
}

fn lib<T>(r: covqec::Result<T>) -> Result<T, (CovqecStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CovqecStatus, String) {
    (CovqecStatus::NullPointer, format!("{what} is NULL"))
}

fn nonnull<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CovqecStatus, String)> {
    // SAFETY: callers pass pointers obtained from this library or valid
    // out-parameters; NULL is rejected here.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (CovqecStatus, String)> {
    // SAFETY: as for `nonnull`.
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (CovqecStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    // SAFETY: non-NULL and NUL-terminated by contract.
    let s = unsafe { CStr::from_ptr(p) };
    s.to_str().map(Path::new).map_err(|_| (CovqecStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn dim(x: u32) -> usize {
    x as usize
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn covqec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn covqec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples a U(1)-covariant code of `k` logical qubits in `n` physical
/// qubits with ancilla weight `alpha`.
///
/// # Safety
/// `out_code` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_code_sample(n: u32, k: u32, alpha: u32, seed: u64, out_code: *mut *mut CovqecU1Code) -> CovqecStatus {
    guard(|| {
        let slot = out(out_code, "out_code")?;
        let code = lib(U1CodeSpec::new(dim(n), dim(k), dim(alpha), seed).and_then(U1Code::sample))?;
        *slot = Box::into_raw(Box::new(CovqecU1Code(code)));
        Ok(())
    })
}

/// Releases a code; NULL is ignored.
///
/// # Safety
/// `code` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_code_free(code: *mut CovqecU1Code) {
    if !code.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(code) });
    }
}

/// Error bounds of the code with its first `t` qubits erased.
///
/// # Safety
/// `code` must be a live handle and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_code_errors(code: *const CovqecU1Code, t: u32, report: *mut CovqecErrorReport) -> CovqecStatus {
    guard(|| {
        let code = &nonnull(code, "code")?.0;
        let slot = out(report, "report")?;
        let pattern = lib(ErasurePattern::first(code.spec().n, dim(t)))?;
        let r = lib(sampled_code_errors(CodeRef::U1(code), &pattern, ZetaStrategy::Marginal))?;
        *slot = CovqecErrorReport {
            eps_choi_upper: r.eps_choi_upper,
            decoupling_term: r.decoupling_term,
            decoupling_trace_norm: r.decoupling_trace_norm,
            symmetry_term: r.symmetry_term,
            eps_worst_upper: r.eps_worst_upper,
            choi_lower_bound: r.choi_lower_bound,
            worst_lower_bound: r.worst_lower_bound,
        };
        Ok(())
    })
}

/// Writes the code to `path` in the covqec container format.
///
/// # Safety
/// `code` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_code_save(code: *const CovqecU1Code, path: *const c_char) -> CovqecStatus {
    guard(|| {
        let code = &nonnull(code, "code")?.0;
        lib(write_atomic(path_arg(path)?, &encode_u1_code(code)))
    })
}

/// Reads a code written by [`covqec_u1_code_save`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_code` writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_code_load(path: *const c_char, out_code: *mut *mut CovqecU1Code) -> CovqecStatus {
    guard(|| {
        let slot = out(out_code, "out_code")?;
        let bytes = lib(read_file(path_arg(path)?))?;
        let code = lib(decode_u1_code(&bytes))?;
        *slot = Box::into_raw(Box::new(CovqecU1Code(code)));
        Ok(())
    })
}

/// Closed-form Choi symmetry term of the averaged U(1) code.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_choi_symmetry_term(n: u32, k: u32, t: u32, alpha: u32, result: *mut CovqecSymmetryTerm) -> CovqecStatus {
    guard(|| {
        let slot = out(result, "result")?;
        let s = lib(u1_choi_symmetry_term(dim(n), dim(k), dim(t), dim(alpha)))?;
        *slot = CovqecSymmetryTerm { fidelity: s.fidelity, purified: s.purified, trace_distance: s.trace_dist };
        Ok(())
    })
}

/// Worst-case (over logical basis inputs) purified symmetry term.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_worst_symmetry_term(n: u32, k: u32, t: u32, alpha: u32, result: *mut f64) -> CovqecStatus {
    guard(|| {
        let slot = out(result, "result")?;
        *slot = lib(u1_worst_symmetry_term(dim(n), dim(k), dim(t), dim(alpha)))?;
        Ok(())
    })
}

/// Bracket `lower <= H_min(A*|RE) <= upper` for the U(1) Choi state.
///
/// # Safety
/// `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_u1_hmin_bounds(n: u32, k: u32, t: u32, alpha: u32, lower: *mut f64, upper: *mut f64) -> CovqecStatus {
    guard(|| {
        let lo = out(lower, "lower")?;
        let hi = out(upper, "upper")?;
        (*lo, *hi) = lib(u1_kappa_bounds(dim(n), dim(k), dim(t), dim(alpha)))?;
        Ok(())
    })
}

/// `H_min(P|Q)` of a positive operator on `P ⊗ Q` given as row-major real
/// and imaginary parts of length `(p q)²`.
///
/// # Safety
/// `re` and `im` must point to `(p q)²` readable doubles and `result`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_hmin_sdp(re: *const f64, im: *const f64, p: u32, q: u32, result: *mut f64) -> CovqecStatus {
    guard(|| {
        let slot = out(result, "result")?;
        if re.is_null() || im.is_null() {
            return Err(null("matrix data"));
        }
        let d = dim(p).checked_mul(dim(q)).ok_or((CovqecStatus::InvalidArgument, "p q overflows".into()))?;
        let len = d.checked_mul(d).ok_or((CovqecStatus::InvalidArgument, "(p q)² overflows".into()))?;
        // SAFETY: the caller guarantees `len` readable elements.
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len)) };
        let rho = CMat::from_fn(d, d, |i, j| Complex64::new(re[i * d + j], im[i * d + j]));
        *slot = lib(hmin_sdp(&rho, dim(p), dim(q)))?.hmin();
        Ok(())
    })
}

/// Builds the Schur–Weyl decomposition of `n` qudits of dimension `d`.
///
/// # Safety
/// `out_schur` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_schur_new(n: u32, d: u32, out_schur: *mut *mut CovqecSchur) -> CovqecStatus {
    guard(|| {
        let slot = out(out_schur, "out_schur")?;
        let s = lib(schur_decomposition(dim(n), dim(d)))?;
        *slot = Box::into_raw(Box::new(CovqecSchur(s)));
        Ok(())
    })
}

/// Releases a decomposition; NULL is ignored.
///
/// # Safety
/// `schur` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn covqec_schur_free(schur: *mut CovqecSchur) {
    if !schur.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(schur) });
    }
}

/// Number of irreps `λ` in the decomposition.
///
/// # Safety
/// `schur` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_schur_block_count(schur: *const CovqecSchur, count: *mut usize) -> CovqecStatus {
    guard(|| {
        let s = &nonnull(schur, "schur")?.0;
        *out(count, "count")? = s.blocks.len();
        Ok(())
    })
}

/// Dimensions `l_λ` (SU(d) irrep) and `r_λ` (multiplicity) of block `index`.
///
/// # Safety
/// `schur` must be a live handle; `l` and `r` must be writable.
#[no_mangle]
pub unsafe extern "C" fn covqec_schur_block_dims(schur: *const CovqecSchur, index: usize, l: *mut usize, r: *mut usize) -> CovqecStatus {
    guard(|| {
        let s = &nonnull(schur, "schur")?.0;
        let b = s
            .blocks
            .get(index)
            .ok_or_else(|| (CovqecStatus::InvalidArgument, format!("block {index} out of range ({} blocks)", s.blocks.len())))?;
        *out(l, "l")? = b.l;
        *out(r, "r")? = b.r;
        Ok(())
    })
}
