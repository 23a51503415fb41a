//! C ABI over `sse-core`.
//!
//! Matrices and pipeline results are opaque handles owned by the caller and
//! released with the matching `*_free` function. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`sse_string_free`]. Every function returns an [`SseStatus`]; on failure
//! [`sse_last_error`] describes the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sse_core::cli::format::{parse_json, to_json, ChainFile, MatrixFile};
use sse_core::cli::{self, exit_code};
use sse_core::doubly::{self, Options, PipelineReport, RoutePolicy, DEFAULT_SIZE_CAP};
use sse_core::error::Error;
use sse_core::exactmat::{Rat, RatMatrix};
use sse_core::stochastic::{classify, left_perron};

/// Status codes. `0..=5` match the exit codes of the `sse` binary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SseStatus {
    Ok = 0,
    VerifyFailed = 1,
    Parse = 2,
    Precondition = 3,
    SizeCap = 4,
    SameSizeUnavailable = 5,
    NullPointer = 10,
    Internal = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SseRoute {
    PreferSameSize = 0,
    SameSizeOnly = 1,
    SplitOnly = 2,
}

/// Opaque exact rational matrix.
pub struct SseMatrix(RatMatrix);

/// Opaque result of [`sse_make_doubly`].
pub struct SsePipeline(PipelineReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

struct Fail(SseStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match exit_code(&e) {
            cli::EXIT_VERIFY => SseStatus::VerifyFailed,
            cli::EXIT_USAGE => SseStatus::Parse,
            cli::EXIT_PRECONDITION => SseStatus::Precondition,
            cli::EXIT_SIZE_CAP => SseStatus::SizeCap,
            cli::EXIT_SAME_SIZE => SseStatus::SameSizeUnavailable,
            _ => SseStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SseStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure or panic, and returns the status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SseStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SseStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(SseStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("string out-pointer"));
    }
    let c = CString::new(s).map_err(|_| Fail(SseStatus::Internal, "string contains nul".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sse_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a matrix document `{"rows", "cols", "entries"}` with rational
/// literal strings.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_from_json(json: *const c_char, out: *mut *mut SseMatrix) -> SseStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let file: MatrixFile = parse_json(text).map_err(|e| Fail(SseStatus::Parse, e))?;
        put(out, SseMatrix(file.to_matrix()?), "matrix out-pointer")
    })
}

/// Builds a `rows x cols` matrix from `rows * cols` rational literals in
/// row-major order.
///
/// # Safety
/// `entries` must point to `rows * cols` nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_from_literals(
    rows: usize,
    cols: usize,
    entries: *const *const c_char,
    out: *mut *mut SseMatrix,
) -> SseStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        let len = rows.checked_mul(cols).ok_or_else(|| Fail(SseStatus::Parse, "shape overflows".into()))?;
        let mut data = Vec::with_capacity(len);
        for k in 0..len {
            let lit = str_arg(*entries.add(k), "entry")?;
            data.push(lit.parse::<Rat>().map_err(Error::from)?);
        }
        put(out, SseMatrix(RatMatrix::new(rows, cols, data)?), "matrix out-pointer")
    })
}

/// # Safety
/// `m` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_free(m: *mut SseMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live matrix handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_shape(m: *const SseMatrix, rows: *mut usize, cols: *mut usize) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("shape out-pointer"));
        }
        *rows = m.0.rows();
        *cols = m.0.cols();
        Ok(())
    })
}

/// Entry `(i, j)` (0-based) as a rational literal.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_entry(m: *const SseMatrix, i: usize, j: usize, out: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        if i >= m.0.rows() || j >= m.0.cols() {
            return Err(Fail(
                SseStatus::Precondition,
                format!("entry ({i}, {j}) out of range for {}x{}", m.0.rows(), m.0.cols()),
            ));
        }
        put_string(out, m.0.get(i, j).to_string())
    })
}

/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_matrix_to_json(m: *const SseMatrix, out: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        put_string(out, to_json(&MatrixFile::from_matrix(&m.0)))
    })
}

/// One-line stochastic profile, e.g. `positive doubly stochastic primitive`.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_classify(m: *const SseMatrix, out: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        put_string(out, classify(&m.0).summary())
    })
}

/// Left Perron vector of an irreducible stochastic matrix, formatted as
/// `(2/5, 2/5, 1/5)`.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_left_perron(m: *const SseMatrix, out: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        put_string(out, left_perron(&m.0)?.to_string())
    })
}

/// Runs the pipeline to a positive doubly stochastic matrix. `route` is an
/// [`SseRoute`] value; `size_cap` 0 selects the default cap; `max_den` 0
/// skips re-denomination.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_make_doubly(
    m: *const SseMatrix,
    route: i32,
    max_den: u64,
    size_cap: usize,
    out: *mut *mut SsePipeline,
) -> SseStatus {
    guard(|| {
        let m = ref_arg(m, "matrix")?;
        let route = match route {
            r if r == SseRoute::PreferSameSize as i32 => RoutePolicy::PreferSameSize,
            r if r == SseRoute::SameSizeOnly as i32 => RoutePolicy::SameSizeOnly,
            r if r == SseRoute::SplitOnly as i32 => RoutePolicy::SplitOnly,
            r => return Err(Fail(SseStatus::Parse, format!("unknown route {r}"))),
        };
        let options = Options {
            route,
            max_den: (max_den > 0).then_some(max_den),
            size_cap: if size_cap == 0 { DEFAULT_SIZE_CAP } else { size_cap },
        };
        put(out, SsePipeline(doubly::make_doubly(&m.0, &options)?), "pipeline out-pointer")
    })
}

/// # Safety
/// `p` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sse_pipeline_free(p: *mut SsePipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Lag and size of the emitted chain; `same_size` is 1 on the same-size
/// route.
///
/// # Safety
/// `p` must be a live pipeline handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_pipeline_info(
    p: *const SsePipeline,
    lag: *mut usize,
    size: *mut usize,
    same_size: *mut i32,
) -> SseStatus {
    guard(|| {
        let p = ref_arg(p, "pipeline")?;
        if lag.is_null() || size.is_null() || same_size.is_null() {
            return Err(null("info out-pointer"));
        }
        *lag = p.0.chain.lag();
        *size = p.0.chain.size();
        *same_size = i32::from(p.0.route == doubly::Route::SameSizePath);
        Ok(())
    })
}

/// A copy of the doubly stochastic output.
///
/// # Safety
/// `p` must be a live pipeline handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_pipeline_output(p: *const SsePipeline, out: *mut *mut SseMatrix) -> SseStatus {
    guard(|| {
        let p = ref_arg(p, "pipeline")?;
        put(out, SseMatrix(p.0.output.clone()), "matrix out-pointer")
    })
}

/// The chain document accepted by [`sse_verify_chain_json`] and `sse verify`.
///
/// # Safety
/// `p` must be a live pipeline handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sse_pipeline_chain_json(p: *const SsePipeline, out: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let p = ref_arg(p, "pipeline")?;
        put_string(out, to_json(&cli::pipeline_chain_file("pipeline result", &p.0)))
    })
}

/// Verifies a chain document. Returns `SSE_STATUS_OK` when it passes and
/// `SSE_STATUS_VERIFY_FAILED` when it does not; in both cases `report`
/// (if non-null) receives the per-step report.
///
/// # Safety
/// `json` must be a nul-terminated string; `report` may be null.
#[no_mangle]
pub unsafe extern "C" fn sse_verify_chain_json(json: *const c_char, report: *mut *mut c_char) -> SseStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let file: ChainFile = parse_json(text).map_err(|e| Fail(SseStatus::Parse, e))?;
        let verdict = cli::verify_chain_file(&file).map_err(|e| Fail(SseStatus::Parse, e.to_string()))?;
        if !report.is_null() {
            put_string(report, verdict.report.clone())?;
        }
        if verdict.passed() {
            Ok(())
        } else {
            let first = verdict.report.lines().find(|l| l.contains("FAIL") || l.contains("mismatch")).unwrap_or("");
            Err(Fail(SseStatus::VerifyFailed, format!("chain does not verify: {}", first.trim())))
        }
    })
}
