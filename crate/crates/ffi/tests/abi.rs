use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use subsquares_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ss_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn construct_inspect_and_verify() {
    let parts = [3usize, 3, 3, 2, 1];
    let mut sq = ptr::null_mut();
    unsafe {
        assert_eq!(ss_construct(parts.as_ptr(), parts.len(), &mut sq), SsStatus::Ok);
        assert_eq!(ss_square_order(sq), 12);
        assert_eq!(ss_square_block_count(sq), 5);
        let mut cells = vec![0u32; 144];
        assert_eq!(ss_square_cells(sq, cells.as_mut_ptr(), cells.len()), SsStatus::Ok);
        assert!(cells.iter().all(|&c| (1..=12).contains(&c)));
        let mut r = [0usize; 6];
        assert_eq!(ss_square_block(sq, 3, r.as_mut_ptr()), SsStatus::Ok);
        assert_eq!(r, [10, 11, 10, 11, 10, 11]);
        assert_eq!(ss_verify(sq, parts.as_ptr(), parts.len()), SsStatus::Ok);
        let wrong = [3usize, 3, 3, 3];
        assert_eq!(ss_verify(sq, wrong.as_ptr(), wrong.len()), SsStatus::NotVerified);
        assert_eq!(ss_square_block(sq, 5, r.as_mut_ptr()), SsStatus::InvalidArgument);
        assert_eq!(ss_square_cells(sq, cells.as_mut_ptr(), 10), SsStatus::InvalidArgument);

        // the raw cells wrapped again verify in normal form
        let mut again = ptr::null_mut();
        assert_eq!(ss_square_from_cells(12, cells.as_ptr(), &mut again), SsStatus::Ok);
        assert_eq!(ss_square_block_count(again), 0);
        assert_eq!(ss_verify(again, parts.as_ptr(), parts.len()), SsStatus::Ok);
        ss_square_free(again);
        ss_square_free(sq);
    }
}

#[test]
fn error_codes() {
    let mut sq = ptr::null_mut();
    let mut verdict = 7;
    unsafe {
        let two = [2usize, 2];
        assert_eq!(ss_construct(two.as_ptr(), 2, &mut sq), SsStatus::Nonexistent);
        assert!(sq.is_null());
        assert!(!last_error().is_empty());
        let unknown = [5usize, 3, 2, 2, 1];
        assert_eq!(ss_construct(unknown.as_ptr(), 5, &mut sq), SsStatus::OutOfScope);
        assert_eq!(ss_exists(unknown.as_ptr(), 5, &mut verdict), SsStatus::Ok);
        assert_eq!(verdict, -1);
        assert_eq!(last_error(), "");
        assert_eq!(ss_exists(two.as_ptr(), 2, &mut verdict), SsStatus::Ok);
        assert_eq!(verdict, 0);
        assert_eq!(ss_construct(ptr::null(), 0, &mut sq), SsStatus::InvalidArgument);
        let zero = [3usize, 0];
        assert_eq!(ss_construct(zero.as_ptr(), 2, &mut sq), SsStatus::InvalidArgument);
        let bad = [1u32, 1, 2, 2];
        assert_eq!(ss_square_from_cells(2, bad.as_ptr(), &mut sq), SsStatus::NotVerified);
        assert_eq!(ss_square_order(ptr::null()), 0);
        ss_square_free(ptr::null_mut());
    }
}

#[test]
fn ils_blocks_follow_request_order() {
    let holes = [1usize, 3, 2];
    let mut sq = ptr::null_mut();
    unsafe {
        assert_eq!(ss_construct_ils(20, holes.as_ptr(), 3, &mut sq), SsStatus::Ok);
        assert_eq!(ss_square_order(sq), 20);
        assert_eq!(ss_square_block_count(sq), 3);
        for (i, &h) in holes.iter().enumerate() {
            let mut r = [0usize; 6];
            assert_eq!(ss_square_block(sq, i, r.as_mut_ptr()), SsStatus::Ok);
            assert_eq!(r[1] - r[0] + 1, h);
        }
        ss_square_free(sq);
        assert_eq!(ss_construct_ils(10, holes.as_ptr(), 3, &mut sq), SsStatus::OutOfScope);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "subsquares.h"

int main(void) {
    size_t parts[] = {2, 2, 2, 2, 2, 1, 1, 1, 1, 1};
    SsSquare *sq = NULL;
    if (ss_construct(parts, 10, &sq) != SS_STATUS_OK) {
        fprintf(stderr, "%s\n", ss_last_error());
        return 1;
    }
    int ok = ss_square_order(sq) == 15 && ss_verify(sq, parts, 10) == SS_STATUS_OK;
    ss_square_free(sq);
    size_t two[] = {4, 4};
    ok = ok && ss_construct(two, 2, &sq) == SS_STATUS_NONEXISTENT && sq == NULL;
    return ok ? 0 : 2;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/subsquares.h");
    assert!(header.exists(), "build script writes the header");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ss_construct", "ss_verify", "ss_square_free", "ss_last_error", "SS_STATUS_NOT_VERIFIED"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // the static library sits next to the deps directory holding this test
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libsubsquares_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C link check: no cc or no {}", lib.display());
        return;
    }
    let tmp = std::env::temp_dir().join(format!("subsquares_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = tmp.join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).status().unwrap();
    assert!(run.success(), "C program exited with {run}");
    let _ = std::fs::remove_dir_all(&tmp);
}
