use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use webtaylor_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wt_last_error()) }.to_string_lossy().into_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { wt_string_free(s) };
    out
}

#[test]
fn parse_run_and_read_report() {
    let toml = CString::new("model = \"fin\"\nsuites = [\"sum.ss\"]\nsamples = 8\n[trunc]\nbang_degree = 2\ns_bound = 2\n").unwrap();
    let mut sc = ptr::null_mut();
    let mut rep = ptr::null_mut();
    unsafe {
        assert_eq!(wt_scenario_parse(toml.as_ptr(), &mut sc), WtStatus::Ok);
        assert_eq!(wt_run(sc, &mut rep), WtStatus::Ok);
        assert_eq!(wt_report_passed(rep), 1);
        assert_eq!(wt_report_failures(rep), 0);
        let json: serde_json::Value = serde_json::from_str(&take(wt_report_json(rep))).unwrap();
        assert_eq!(json["scenario"]["model"], "fin");
        assert_eq!(json["suites"][0]["id"], "sum.ss");
        assert!(take(wt_report_text(rep)).contains("overall: pass"));
        wt_report_free(rep);
        wt_scenario_free(sc);
    }
}

#[test]
fn mutation_makes_report_fail() {
    let mut sc = ptr::null_mut();
    let mut rep = ptr::null_mut();
    let model = CString::new("pcoh").unwrap();
    let suites = CString::new("taylor.coalgebra").unwrap();
    let mutation = CString::new("coalgebra").unwrap();
    unsafe {
        assert_eq!(wt_scenario_new(&mut sc), WtStatus::Ok);
        assert_eq!(wt_scenario_set_model(sc, model.as_ptr()), WtStatus::Ok);
        assert_eq!(wt_scenario_set_suites(sc, suites.as_ptr()), WtStatus::Ok);
        assert_eq!(wt_scenario_set_params(sc, 1, 6, 2, 2), WtStatus::Ok);
        assert_eq!(wt_scenario_set_mutation(sc, mutation.as_ptr()), WtStatus::Ok);
        assert_eq!(wt_run(sc, &mut rep), WtStatus::Ok);
        assert_eq!(wt_report_passed(rep), 0);
        assert!(wt_report_failures(rep) > 0);
        wt_report_free(rep);
        wt_scenario_free(sc);
    }
}

#[test]
fn errors_map_to_codes() {
    let bad = CString::new("model = \"pcoh\"\nseed = [").unwrap();
    let mut sc = ptr::null_mut();
    unsafe {
        assert_eq!(wt_scenario_parse(bad.as_ptr(), &mut sc), WtStatus::Parse);
        assert!(last_error().contains("<scenario>"));
        assert_eq!(wt_scenario_parse(ptr::null(), &mut sc), WtStatus::NullPointer);
        let unknown = CString::new("model = \"banach\"").unwrap();
        assert_eq!(wt_scenario_parse(unknown.as_ptr(), &mut sc), WtStatus::UnknownModel);

        assert_eq!(wt_scenario_new(&mut sc), WtStatus::Ok);
        assert_eq!(wt_scenario_set_params(sc, 0, 5, 2, 0), WtStatus::InvalidArgument);
        assert_eq!(wt_scenario_set_params(sc, u64::MAX, 5, 2, 2), WtStatus::InvalidArgument);
        let nope = CString::new("sum,nope").unwrap();
        assert_eq!(wt_scenario_set_suites(sc, nope.as_ptr()), WtStatus::UnknownSuite);
        let odd = CString::new("flip").unwrap();
        assert_eq!(wt_scenario_set_mutation(sc, odd.as_ptr()), WtStatus::InvalidArgument);
        assert_eq!(wt_scenario_set_mutation(sc, ptr::null()), WtStatus::Ok);
        wt_scenario_free(sc);

        assert_eq!(wt_run(ptr::null(), &mut ptr::null_mut()), WtStatus::NullPointer);
        assert_eq!(wt_report_passed(ptr::null()), -1);
        assert!(wt_report_json(ptr::null()).is_null());
        wt_report_free(ptr::null_mut());
        wt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/webtaylor.h")).unwrap();
    for f in ["wt_scenario_parse", "wt_run", "wt_report_json", "wt_report_free", "wt_string_free", "wt_last_error", "WT_STATUS_UNKNOWN_SUITE"] {
        assert!(header.contains(f), "{f}");
    }
}

/// Compile the C smoke program against the header and static library when a C compiler exists.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipped: no C compiler");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libwebtaylor_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("wt_smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("c smoke ok"));
}
