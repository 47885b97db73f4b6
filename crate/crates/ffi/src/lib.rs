//! C ABI over the construction engine.
//!
//! Squares are opaque handles owning a latin square and, when it came from
//! a construction, its subsquare blocks. Cells, symbols and block ranges
//! cross the boundary 1-based. Every function returns an [`SsStatus`]; on
//! failure `ss_last_error` describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subsquares::{
    construct, construct_ils, exists, verify_realization, Error, Existence, LatinSquare, Partition,
    SubsquareCertificate,
};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    /// No realization exists.
    Nonexistent = 1,
    /// The partition lies outside the supported families.
    OutOfScope = 2,
    /// Null pointer, bad length, malformed square or partition.
    InvalidArgument = 3,
    /// The square does not realize the partition.
    NotVerified = 4,
    /// Internal failure, including caught panics.
    Internal = 5,
}

/// A latin square with optional subsquare blocks.
pub struct SsSquare {
    square: LatinSquare,
    cert: Option<SubsquareCertificate>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::Nonexistent(_) => SsStatus::Nonexistent,
        Error::Precondition(_) | Error::Infeasible(_) => SsStatus::OutOfScope,
        Error::Malformed(_) | Error::InvalidPartition(_) | Error::PartitionSum { .. } => SsStatus::InvalidArgument,
        Error::NotLatin(_) | Error::NotSubsquare { .. } | Error::NotDisjoint { .. } => SsStatus::NotVerified,
        Error::SearchExhausted(_) | Error::Internal(_) => SsStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (SsStatus, String)>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside the library");
            SsStatus::Internal
        }
    }
}

fn lib(e: Error) -> (SsStatus, String) {
    (status_of(&e), e.to_string())
}

fn bad(msg: &str) -> (SsStatus, String) {
    (SsStatus::InvalidArgument, msg.to_string())
}

/// # Safety
/// `parts` must point to `len` readable values when `len > 0`.
unsafe fn read_parts(parts: *const usize, len: usize) -> Result<Partition, (SsStatus, String)> {
    if parts.is_null() || len == 0 {
        return Err(bad("partition pointer is null or empty"));
    }
    let v = std::slice::from_raw_parts(parts, len).to_vec();
    Partition::new(v).map_err(lib)
}

fn hand_out(out: *mut *mut SsSquare, sq: SsSquare) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(sq)) };
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Existence verdict: `*verdict` is 1 (exists), 0 (does not) or -1
/// (unknown).
///
/// # Safety
/// `parts` must point to `len` values and `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_exists(parts: *const usize, len: usize, verdict: *mut i32) -> SsStatus {
    guard(|| {
        if verdict.is_null() {
            return Err(bad("verdict pointer is null"));
        }
        let p = read_parts(parts, len)?;
        *verdict = match exists(&p) {
            Existence::Yes(_) => 1,
            Existence::No(_) => 0,
            Existence::Unknown => -1,
        };
        Ok(())
    })
}

/// Builds a verified realization of the partition, blocks in non-increasing
/// order of size along the diagonal.
///
/// # Safety
/// `parts` must point to `len` values; `out` must be writable. Free the
/// result with `ss_square_free`.
#[no_mangle]
pub unsafe extern "C" fn ss_construct(parts: *const usize, len: usize, out: *mut *mut SsSquare) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("output pointer is null"));
        }
        *out = ptr::null_mut();
        let p = read_parts(parts, len)?;
        let (square, cert, _) = construct(&p).map_err(lib)?;
        hand_out(out, SsSquare { square, cert: Some(cert) });
        Ok(())
    })
}

/// Incomplete latin square of order `n` with disjoint holes of the given
/// orders, blocks in request order.
///
/// # Safety
/// As for `ss_construct`.
#[no_mangle]
pub unsafe extern "C" fn ss_construct_ils(
    n: usize,
    holes: *const usize,
    len: usize,
    out: *mut *mut SsSquare,
) -> SsStatus {
    guard(|| {
        if out.is_null() {
            return Err(bad("output pointer is null"));
        }
        *out = ptr::null_mut();
        let h = read_parts(holes, len)?;
        let (square, cert) = construct_ils(n, h.parts()).map_err(lib)?;
        hand_out(out, SsSquare { square, cert: Some(cert) });
        Ok(())
    })
}

/// Wraps a caller's square given as `n * n` row-major 1-based symbols.
///
/// # Safety
/// `cells` must point to `n * n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_square_from_cells(n: usize, cells: *const u32, out: *mut *mut SsSquare) -> SsStatus {
    guard(|| {
        if out.is_null() || cells.is_null() {
            return Err(bad("null pointer"));
        }
        *out = ptr::null_mut();
        let len = n.checked_mul(n).ok_or_else(|| bad("order overflows"))?;
        let raw = std::slice::from_raw_parts(cells, len);
        let mut v = Vec::with_capacity(len);
        for &c in raw {
            if c == 0 {
                return Err(bad("symbols are 1-based"));
            }
            v.push(c as usize - 1);
        }
        let square = LatinSquare::from_cells(n, v).map_err(lib)?;
        hand_out(out, SsSquare { square, cert: None });
        Ok(())
    })
}

/// Order of the square, or 0 for a null handle.
///
/// # Safety
/// `sq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_square_order(sq: *const SsSquare) -> usize {
    sq.as_ref().map_or(0, |s| s.square.order())
}

/// Copies the `n * n` row-major 1-based cells into `buf`.
///
/// # Safety
/// `sq` must be a live handle and `buf` must hold `buf_len` values.
#[no_mangle]
pub unsafe extern "C" fn ss_square_cells(sq: *const SsSquare, buf: *mut u32, buf_len: usize) -> SsStatus {
    guard(|| {
        let s = sq.as_ref().ok_or_else(|| bad("null handle"))?;
        let cells = s.square.cells();
        if buf.is_null() || buf_len < cells.len() {
            return Err(bad("buffer too small"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, cells.len());
        for (d, &c) in dst.iter_mut().zip(cells) {
            *d = (c + 1) as u32;
        }
        Ok(())
    })
}

/// Number of subsquare blocks the handle carries (0 for wrapped squares).
///
/// # Safety
/// `sq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_square_block_count(sq: *const SsSquare) -> usize {
    sq.as_ref().and_then(|s| s.cert.as_ref()).map_or(0, |c| c.blocks.len())
}

/// Inclusive 1-based ranges of block `index`, written to `ranges` as
/// row_lo, row_hi, col_lo, col_hi, sym_lo, sym_hi.
///
/// # Safety
/// `sq` must be a live handle and `ranges` must hold six values.
#[no_mangle]
pub unsafe extern "C" fn ss_square_block(sq: *const SsSquare, index: usize, ranges: *mut usize) -> SsStatus {
    guard(|| {
        let s = sq.as_ref().ok_or_else(|| bad("null handle"))?;
        if ranges.is_null() {
            return Err(bad("null output"));
        }
        let b = s
            .cert
            .as_ref()
            .and_then(|c| c.blocks.get(index))
            .ok_or_else(|| bad("block index out of range"))?;
        let span = |v: &[usize]| -> Result<(usize, usize), (SsStatus, String)> {
            let (lo, hi) = (v[0], v[v.len() - 1]);
            if hi - lo + 1 != v.len() || v.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err((SsStatus::Internal, "block is not a contiguous range".into()));
            }
            Ok((lo + 1, hi + 1))
        };
        let out = std::slice::from_raw_parts_mut(ranges, 6);
        for (k, v) in [&b.rows, &b.cols, &b.symbols].into_iter().enumerate() {
            let (lo, hi) = span(v)?;
            out[2 * k] = lo;
            out[2 * k + 1] = hi;
        }
        Ok(())
    })
}

/// Checks that the square realizes the partition: against the handle's own
/// blocks when it has them, otherwise in normal form.
///
/// # Safety
/// `sq` must be a live handle; `parts` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn ss_verify(sq: *const SsSquare, parts: *const usize, len: usize) -> SsStatus {
    guard(|| {
        let s = sq.as_ref().ok_or_else(|| bad("null handle"))?;
        let p = read_parts(parts, len)?;
        verify_realization(&s.square, &p, s.cert.as_ref()).map_err(|e| {
            let (status, msg) = lib(e);
            let status = if status == SsStatus::InvalidArgument { SsStatus::NotVerified } else { status };
            (status, msg)
        })?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sq` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_square_free(sq: *mut SsSquare) {
    if !sq.is_null() {
        drop(Box::from_raw(sq));
    }
}
