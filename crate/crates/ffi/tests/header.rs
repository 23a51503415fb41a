//! The generated header declares every exported function and compiles
//! against the static library from C.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sse_ffi.h")).unwrap()
}

#[test]
fn header_declares_exports() {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let h = header();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(h.contains(&format!("{name}(")), "header lacks {name}");
    }
    for item in ["typedef struct SseMatrix SseMatrix;", "typedef struct SsePipeline SsePipeline;", "SSE_STATUS_PANIC = 12"] {
        assert!(h.contains(item), "header lacks {item}");
    }
}

/// `target/<profile>`, found from this test binary's location in `deps/`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libsse_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let c_src = dir.path().join("smoke.c");
    std::fs::write(
        &c_src,
        r#"
#include <stdio.h>
#include <string.h>
#include "sse_ffi.h"

int main(void) {
    const char *lits[] = {"7/10", "1/5", "1/10", "1/5", "7/10", "1/10", "1/5", "1/5", "3/5"};
    SseMatrix *m = NULL;
    if (sse_matrix_from_literals(3, 3, lits, &m) != SSE_STATUS_OK) return 10;
    SsePipeline *p = NULL;
    if (sse_make_doubly(m, SSE_ROUTE_SPLIT_ONLY, 0, 0, &p) != SSE_STATUS_OK) return 11;
    uintptr_t lag = 0, size = 0;
    int same = -1;
    if (sse_pipeline_info(p, &lag, &size, &same) != SSE_STATUS_OK) return 12;
    char *json = NULL;
    if (sse_pipeline_chain_json(p, &json) != SSE_STATUS_OK) return 13;
    SseStatus st = sse_verify_chain_json(json, NULL);
    sse_string_free(json);
    if (sse_matrix_from_json("{", &m) != SSE_STATUS_PARSE || sse_last_error() == NULL) return 14;
    printf("lag=%lu size=%lu same=%d verify=%d\n", (unsigned long)lag, (unsigned long)size, same, (int)st);
    sse_pipeline_free(p);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&c_src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "lag=2 size=5 same=0 verify=0\n");
}
