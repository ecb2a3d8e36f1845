use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use flowcob_ffi::*;

const THETA: &str = r#"{"n_darts":6,"alpha":[1,0,3,2,5,4],"sigma":[2,5,4,1,0,3]}"#;
const TORUS: &str = r#"{"n_darts":4,"alpha":[1,0,3,2],"sigma":[2,3,1,0]}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    flowcob_string_free(p);
    s
}

fn last_error() -> String {
    let p = flowcob_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn map(json: &str) -> *mut FlowcobMap {
    let mut m = ptr::null_mut();
    assert_eq!(flowcob_map_from_json(cstr(json).as_ptr(), &mut m), FlowcobStatus::Ok);
    m
}

#[test]
fn map_counts_dual_and_isomorphism() {
    unsafe {
        let m = map(THETA);
        let mut c = FlowcobMapCounts::default();
        assert_eq!(flowcob_map_counts(m, &mut c), FlowcobStatus::Ok);
        assert_eq!(c, FlowcobMapCounts { vertices: 2, edges: 3, faces: 3, genus: 0 });

        let mut d = ptr::null_mut();
        assert_eq!(flowcob_map_dual(m, &mut d), FlowcobStatus::Ok);
        let mut dc = FlowcobMapCounts::default();
        flowcob_map_counts(d, &mut dc);
        assert_eq!((dc.vertices, dc.faces, dc.genus), (3, 2, 0));

        let mut dd = ptr::null_mut();
        flowcob_map_dual(d, &mut dd);
        let mut iso = false;
        assert_eq!(flowcob_map_isomorphic(dd, m, &mut iso), FlowcobStatus::Ok);
        assert!(iso);
        assert_eq!(flowcob_map_isomorphic(d, m, &mut iso), FlowcobStatus::Ok);
        assert!(!iso);

        let t = map(TORUS);
        flowcob_map_counts(t, &mut c);
        assert_eq!(c, FlowcobMapCounts { vertices: 1, edges: 2, faces: 1, genus: 1 });

        for h in [m, d, dd, t] {
            flowcob_map_free(h);
        }
    }
}

#[test]
fn canonical_form_reports_required_size() {
    unsafe {
        let m = map(THETA);
        let mut len = 0;
        assert_eq!(flowcob_map_canonical_form(m, ptr::null_mut(), 0, &mut len), FlowcobStatus::BufferTooSmall);
        assert!(len > 0);
        assert!(last_error().contains("bytes"));
        let mut buf = vec![0u8; len];
        let mut len2 = 0;
        assert_eq!(flowcob_map_canonical_form(m, buf.as_mut_ptr(), buf.len(), &mut len2), FlowcobStatus::Ok);
        assert_eq!(len2, len);

        // Same map with shuffled labels gives the same bytes.
        let relabeled = map(r#"{"n_darts":6,"alpha":[1,0,3,2,5,4],"sigma":[4,3,0,5,2,1]}"#);
        let mut iso = false;
        flowcob_map_isomorphic(m, relabeled, &mut iso);
        let mut other = vec![0u8; len];
        let status = flowcob_map_canonical_form(relabeled, other.as_mut_ptr(), other.len(), &mut len2);
        assert_eq!(status, FlowcobStatus::Ok);
        assert_eq!(iso, buf == other);
        flowcob_map_free(m);
        flowcob_map_free(relabeled);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let m = map(TORUS);
        let mut s = ptr::null_mut();
        assert_eq!(flowcob_map_to_json(m, &mut s), FlowcobStatus::Ok);
        let json = take_string(s);
        let back = map(&json);
        let mut iso = false;
        flowcob_map_isomorphic(m, back, &mut iso);
        assert!(iso);
        flowcob_map_free(m);
        flowcob_map_free(back);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(flowcob_map_from_json(ptr::null(), &mut m), FlowcobStatus::NullPointer);
        assert_eq!(flowcob_map_from_json(cstr("{").as_ptr(), &mut m), FlowcobStatus::Parse);
        let bad_utf8 = [0xffu8, 0];
        assert_eq!(flowcob_map_from_json(bad_utf8.as_ptr().cast(), &mut m), FlowcobStatus::InvalidUtf8);
        let disconnected = r#"{"n_darts":4,"alpha":[1,0,3,2],"sigma":[1,0,3,2]}"#;
        assert_eq!(flowcob_map_from_json(cstr(disconnected).as_ptr(), &mut m), FlowcobStatus::InvalidMap);
        assert!(last_error().contains("connected"));
        assert!(m.is_null());
        let mut c = FlowcobMapCounts::default();
        assert_eq!(flowcob_map_counts(ptr::null(), &mut c), FlowcobStatus::NullPointer);

        let mut w = ptr::null_mut();
        assert_eq!(flowcob_torus_decompose(2, 0, 0, 1, &mut w), FlowcobStatus::Domain);
        assert!(w.is_null());

        flowcob_map_free(ptr::null_mut());
        flowcob_string_free(ptr::null_mut());
    }
}

#[test]
fn skeleton_reconstruct_validate_and_reduce() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(flowcob_skeleton_from_json(cstr(THETA).as_ptr(), &mut s), FlowcobStatus::Ok);
        let mut fg = ptr::null_mut();
        assert_eq!(flowcob_skeleton_reconstruct(s, &mut fg), FlowcobStatus::Ok);

        let mut z = FlowcobZeroCounts::default();
        flowcob_field_graph_counts(fg, &mut z);
        // sinks at skeleton vertices, sources at faces, saddles on edges
        assert_eq!(z, FlowcobZeroCounts { sources: 3, sinks: 2, saddles: 3, genus: 0 });

        let (mut valid, mut residual, mut report) = (false, 1i64, ptr::null_mut());
        assert_eq!(flowcob_field_graph_validate(fg, &mut valid, &mut residual, &mut report), FlowcobStatus::Ok);
        assert!(valid);
        assert_eq!(residual, 0);
        assert!(take_string(report).contains("\"valid\":true"));

        let mut back = ptr::null_mut();
        assert_eq!(flowcob_field_graph_sink_skeleton(fg, &mut back), FlowcobStatus::Ok);
        let (mut m1, mut m2) = (ptr::null_mut(), ptr::null_mut());
        flowcob_skeleton_map(s, &mut m1);
        flowcob_skeleton_map(back, &mut m2);
        let mut iso = false;
        flowcob_map_isomorphic(m1, m2, &mut iso);
        assert!(iso);

        let mut src = ptr::null_mut();
        assert_eq!(flowcob_field_graph_source_skeleton(fg, &mut src), FlowcobStatus::Ok);
        let mut m3 = ptr::null_mut();
        flowcob_skeleton_map(src, &mut m3);
        let mut c = FlowcobMapCounts::default();
        flowcob_map_counts(m3, &mut c);
        assert_eq!((c.vertices, c.faces), (3, 2));

        let mut fg_json = ptr::null_mut();
        flowcob_field_graph_to_json(fg, &mut fg_json);
        let mut fg2 = ptr::null_mut();
        assert_eq!(flowcob_field_graph_from_json(cstr(&take_string(fg_json)).as_ptr(), &mut fg2), FlowcobStatus::Ok);

        let mut trace = ptr::null_mut();
        assert_eq!(flowcob_skeleton_reduce(s, FLOWCOB_STRATEGY_PHASED, &mut trace), FlowcobStatus::Ok);
        // (V - 1) + (F - 1) moves
        assert_eq!(take_string(trace).lines().count(), 3);
        assert_eq!(flowcob_skeleton_reduce(s, 9, &mut trace), FlowcobStatus::Domain);

        let mut sj = ptr::null_mut();
        flowcob_skeleton_to_json(s, &mut sj);
        assert!(take_string(sj).contains("sink_skeleton"));

        for h in [s, back, src] {
            flowcob_skeleton_free(h);
        }
        for h in [m1, m2, m3] {
            flowcob_map_free(h);
        }
        flowcob_field_graph_free(fg);
        flowcob_field_graph_free(fg2);
    }
}

#[test]
fn torus_decompose_words() {
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(flowcob_torus_decompose(1, 1, 0, 1, &mut w), FlowcobStatus::Ok);
        assert_eq!(take_string(w), "G1");
        assert_eq!(flowcob_torus_decompose(1, 0, 0, 1, &mut w), FlowcobStatus::Ok);
        assert_eq!(take_string(w), "(empty)");
        assert_eq!(flowcob_torus_decompose(1, 0, -1, 1, &mut w), FlowcobStatus::Ok);
        assert_eq!(take_string(w), "G2");
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/flowcob.h")
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 20);
    for name in exported {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    for s in ["FLOWCOB_STATUS_BUFFER_TOO_SMALL", "typedef struct FlowcobMap FlowcobMap", "FLOWCOB_STRATEGY_PHASED"] {
        assert!(h.contains(s), "{s} missing from header");
    }
}

/// Compiles and runs a C program against the static library when a C
/// compiler and the archive are available.
#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libflowcob_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} not built", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let c_src = dir.join("main.c");
    std::fs::write(
        &c_src,
        r#"#include <stdio.h>
#include <string.h>
#include "flowcob.h"
int main(void) {
    FlowcobMap *m = NULL;
    if (flowcob_map_from_json("{\"n_darts\":4,\"alpha\":[1,0,3,2],\"sigma\":[2,3,1,0]}", &m) != FLOWCOB_STATUS_OK) return 1;
    FlowcobMapCounts c;
    if (flowcob_map_counts(m, &c) != FLOWCOB_STATUS_OK || c.genus != 1 || c.vertices != 1) return 2;
    flowcob_map_free(m);
    if (flowcob_map_from_json("[", &m) != FLOWCOB_STATUS_PARSE) return 3;
    if (flowcob_last_error() == NULL) return 4;
    char *w = NULL;
    if (flowcob_torus_decompose(1, 1, 0, 1, &w) != FLOWCOB_STATUS_OK || strcmp(w, "G1") != 0) return 5;
    flowcob_string_free(w);
    puts("ok");
    return 0;
}
"#,
    )
    .unwrap();
    let out = dir.join("main");
    let status = Command::new("cc")
        .arg(&c_src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "C program exited with {:?}", run.status);
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("capi");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
