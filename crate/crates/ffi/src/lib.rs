//! C ABI over `coded_pir`: opaque handles, status codes, and a
//! thread-local message for the last failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use coded_pir::array::apir;
use coded_pir::code::table::bounds_cell;
use coded_pir::construct::{example2_code, gf4_example_code};
use coded_pir::emulation::{accounting_check, distribute, retrieve, CodedStore, Database, RecoveryScheme};
use coded_pir::protocol::{protocol_by_name, RandomTape};
use coded_pir::service::SchemeFile;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Verification = 3,
    OutOfRange = 4,
    Failure = 5,
    Panic = 6,
}

/// A verified recovery scheme: a PIR code or an array code.
pub struct CpCode {
    scheme: Arc<dyn RecoveryScheme>,
}

/// A database distributed over the servers of a code.
pub struct CpStore {
    store: CodedStore,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (CpStatus, String)>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside coded_pir");
            CpStatus::Panic
        }
    }
}

fn fail<E: ToString>(status: CpStatus) -> impl FnOnce(E) -> (CpStatus, String) {
    move |e| (status, e.to_string())
}

fn null() -> (CpStatus, String) {
    (CpStatus::NullPointer, "null pointer argument".into())
}

fn put<T>(out: *mut *mut T, value: T) -> Result<(), (CpStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and verifies a PIR code or array code certificate (JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_code_from_json(json: *const c_char, out: *mut *mut CpCode) -> CpStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(json) }.to_str().map_err(fail(CpStatus::InvalidArgument))?;
        let file: SchemeFile = serde_json::from_str(text).map_err(fail(CpStatus::InvalidArgument))?;
        let scheme = file.into_scheme().map_err(fail(CpStatus::Verification))?;
        put(out, CpCode { scheme })
    })
}

/// Built-in codes: 0 is the `[8,4]` 3-server code, 1 the GF(4) `[5,2]`
/// code, 2 and 3 the array codes for `t = 2, 3`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_code_builtin(which: u32, out: *mut *mut CpCode) -> CpStatus {
    guard(|| {
        let scheme: Arc<dyn RecoveryScheme> = match which {
            0 => Arc::new(example2_code()),
            1 => Arc::new(gf4_example_code()),
            2 | 3 => Arc::new(apir(which as usize).map_err(fail(CpStatus::Failure))?),
            _ => return Err((CpStatus::InvalidArgument, format!("no built-in code {which}"))),
        };
        put(out, CpCode { scheme })
    })
}

/// # Safety
/// `code` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cp_code_free(code: *mut CpCode) {
    if !code.is_null() {
        // SAFETY: allocated by `put`.
        drop(unsafe { Box::from_raw(code) });
    }
}

/// Servers, cells per server, message parts, recipes per part, and field
/// order. Any output pointer may be null.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cp_code_params(
    code: *const CpCode,
    servers: *mut usize,
    rows: *mut usize,
    parts: *mut usize,
    k: *mut usize,
    q: *mut u32,
) -> CpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle.
        let c = unsafe { code.as_ref() }.ok_or_else(null)?;
        let s = &c.scheme;
        // SAFETY: each pointer is either null or writable.
        unsafe {
            for (p, v) in [(servers, s.servers()), (rows, s.rows()), (parts, s.parts()), (k, s.k())] {
                if !p.is_null() {
                    *p = v;
                }
            }
            if !q.is_null() {
                *q = s.field().order();
            }
        }
        Ok(())
    })
}

/// Distributes `n` symbols over the servers of `code`.
///
/// # Safety
/// `symbols` must point to `n` bytes; `code` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_store_new(
    code: *const CpCode,
    symbols: *const u8,
    n: usize,
    out: *mut *mut CpStore,
) -> CpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle.
        let c = unsafe { code.as_ref() }.ok_or_else(null)?;
        if symbols.is_null() && n > 0 {
            return Err(null());
        }
        let data = if n == 0 {
            Vec::new()
        } else {
            // SAFETY: caller guarantees `n` readable bytes.
            unsafe { std::slice::from_raw_parts(symbols, n) }.to_vec()
        };
        let db = Database::new(c.scheme.field().clone(), data).map_err(fail(CpStatus::InvalidArgument))?;
        let store = distribute(&db, Arc::clone(&c.scheme)).map_err(fail(CpStatus::Failure))?;
        put(out, CpStore { store })
    })
}

/// # Safety
/// `store` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cp_store_free(store: *mut CpStore) {
    if !store.is_null() {
        // SAFETY: allocated by `put`.
        drop(unsafe { Box::from_raw(store) });
    }
}

/// Retrieves position `i` with the `protocol_k`-server XOR protocol (0
/// means the code's `k`), using a tape seeded with `seed`. The payload bit
/// counts are checked against the closed form before returning.
///
/// # Safety
/// `store` must be live; `value` writable; `up_bits`, `down_bits` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cp_retrieve(
    store: *const CpStore,
    protocol_k: usize,
    i: usize,
    seed: u64,
    value: *mut u8,
    up_bits: *mut u64,
    down_bits: *mut u64,
) -> CpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle.
        let s = unsafe { store.as_ref() }.ok_or_else(null)?;
        if value.is_null() {
            return Err(null());
        }
        let scheme = s.store.scheme();
        let k = if protocol_k == 0 { scheme.k() } else { protocol_k };
        let p = protocol_by_name("xork", k, scheme.field()).map_err(fail(CpStatus::InvalidArgument))?;
        if i >= s.store.n() {
            return Err((CpStatus::OutOfRange, format!("index {i} of {}", s.store.n())));
        }
        let (v, session) =
            retrieve(&s.store, p.as_ref(), i, &mut RandomTape::new(seed)).map_err(fail(CpStatus::Failure))?;
        accounting_check(&session, p.as_ref()).map_err(fail(CpStatus::Failure))?;
        // SAFETY: checked or documented writable.
        unsafe {
            *value = v;
            if !up_bits.is_null() {
                *up_bits = session.accounting.uploaded_bits;
            }
            if !down_bits.is_null() {
                *down_bits = session.accounting.downloaded_bits;
            }
        }
        Ok(())
    })
}

/// Best known lower and upper bounds on the length of a binary `k`-server
/// PIR code of dimension `s`.
///
/// # Safety
/// `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_bounds_cell(s: usize, k: usize, lower: *mut usize, upper: *mut usize) -> CpStatus {
    guard(|| {
        if lower.is_null() || upper.is_null() {
            return Err(null());
        }
        if s == 0 || k == 0 {
            return Err((CpStatus::OutOfRange, "s and k start at 1".into()));
        }
        let c = bounds_cell(s, k).map_err(fail(CpStatus::OutOfRange))?;
        // SAFETY: checked non-null.
        unsafe {
            *lower = c.lower;
            *upper = c.upper;
        }
        Ok(())
    })
}
