use std::ffi::{CStr, CString};
use std::ptr;

use sse_ffi::*;

const EX43: &str = r#"{"rows": 3, "cols": 3, "entries": [["7/10","1/5","1/10"],["1/5","7/10","1/10"],["1/5","1/5","3/5"]]}"#;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { sse_string_free(s) };
    out
}

fn last_error() -> String {
    let p = sse_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn matrix(json: &str) -> *mut SseMatrix {
    let json = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sse_matrix_from_json(json.as_ptr(), &mut m) }, SseStatus::Ok);
    m
}

#[test]
fn example_pipeline_round_trip() {
    let m = matrix(EX43);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sse_classify(m, &mut s) }, SseStatus::Ok);
    assert_eq!(take(s), "positive stochastic; not doubly stochastic; primitive");
    assert_eq!(unsafe { sse_left_perron(m, &mut s) }, SseStatus::Ok);
    assert_eq!(take(s), "(2/5, 2/5, 1/5)");

    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sse_make_doubly(m, SseRoute::SplitOnly as i32, 0, 0, &mut p) }, SseStatus::Ok);
    let (mut lag, mut size, mut same) = (0, 0, -1);
    assert_eq!(unsafe { sse_pipeline_info(p, &mut lag, &mut size, &mut same) }, SseStatus::Ok);
    assert_eq!((lag, size, same), (2, 5, 0));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sse_pipeline_output(p, &mut out) }, SseStatus::Ok);
    let (mut r, mut c) = (0, 0);
    assert_eq!(unsafe { sse_matrix_shape(out, &mut r, &mut c) }, SseStatus::Ok);
    assert_eq!((r, c), (5, 5));
    assert_eq!(unsafe { sse_matrix_entry(out, 4, 4, &mut s) }, SseStatus::Ok);
    assert_eq!(take(s), "3/5");
    assert_eq!(unsafe { sse_matrix_entry(out, 5, 0, &mut s) }, SseStatus::Precondition);
    assert!(last_error().contains("out of range"));

    assert_eq!(unsafe { sse_pipeline_chain_json(p, &mut s) }, SseStatus::Ok);
    let chain = CString::new(take(s)).unwrap();
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { sse_verify_chain_json(chain.as_ptr(), &mut report) }, SseStatus::Ok);
    assert!(take(report).contains("verdict: PASS"));
    assert!(sse_last_error().is_null());

    let bad = CString::new(chain.to_str().unwrap().replacen("\"7/20\"", "\"2/5\"", 1)).unwrap();
    assert_eq!(unsafe { sse_verify_chain_json(bad.as_ptr(), &mut report) }, SseStatus::VerifyFailed);
    assert!(take(report).contains("product mismatch"));
    assert!(last_error().contains("does not verify"));

    unsafe {
        sse_matrix_free(out);
        sse_pipeline_free(p);
        sse_matrix_free(m);
    }
}

#[test]
fn error_statuses() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sse_matrix_from_json(ptr::null(), &mut m) }, SseStatus::NullPointer);
    let bad = CString::new(r#"{"rows": 1, "cols": 1, "entries": [["1/0"]]}"#).unwrap();
    assert_eq!(unsafe { sse_matrix_from_json(bad.as_ptr(), &mut m) }, SseStatus::Parse);
    assert!(last_error().contains("zero denominator"));

    let lits: Vec<CString> = ["1", "0", "1/2", "1/2"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<_> = lits.iter().map(|s| s.as_ptr()).collect();
    assert_eq!(unsafe { sse_matrix_from_literals(2, 2, ptrs.as_ptr(), &mut m) }, SseStatus::Ok);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sse_make_doubly(m, SseRoute::PreferSameSize as i32, 0, 0, &mut p) }, SseStatus::Precondition);
    assert_eq!(unsafe { sse_make_doubly(m, 7, 0, 0, &mut p) }, SseStatus::Parse);
    assert_eq!(unsafe { sse_make_doubly(ptr::null(), 0, 0, 0, &mut p) }, SseStatus::NullPointer);
    unsafe { sse_matrix_free(m) };

    let m = matrix(EX43);
    assert_eq!(unsafe { sse_make_doubly(m, SseRoute::SplitOnly as i32, 0, 4, &mut p) }, SseStatus::SizeCap);
    let skew = matrix(r#"{"rows": 3, "cols": 3, "entries": [["4/5","1/10","1/10"],["4/5","1/10","1/10"],["1/10","1/10","4/5"]]}"#);
    assert_eq!(
        unsafe { sse_make_doubly(skew, SseRoute::SameSizeOnly as i32, 0, 0, &mut p) },
        SseStatus::SameSizeUnavailable
    );
    unsafe {
        sse_matrix_free(m);
        sse_matrix_free(skew);
        sse_matrix_free(ptr::null_mut());
        sse_string_free(ptr::null_mut());
    }
}

#[test]
fn same_size_route() {
    let m = matrix(EX43);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sse_make_doubly(m, SseRoute::PreferSameSize as i32, 0, 0, &mut p) }, SseStatus::Ok);
    let (mut lag, mut size, mut same) = (9, 0, 0);
    assert_eq!(unsafe { sse_pipeline_info(p, &mut lag, &mut size, &mut same) }, SseStatus::Ok);
    assert_eq!((lag, size, same), (0, 3, 1));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sse_pipeline_chain_json(p, &mut s) }, SseStatus::Ok);
    let chain = CString::new(take(s)).unwrap();
    assert_eq!(unsafe { sse_verify_chain_json(chain.as_ptr(), ptr::null_mut()) }, SseStatus::Ok);
    unsafe {
        sse_pipeline_free(p);
        sse_matrix_free(m);
    }
}
