use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use taumodel_ffi::*;

const PAIR: &str = r#"{"n": 2, "measures": [{"atoms": [["1", "1", "1"], ["2", "3", "1"]]}]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    tm_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = tm_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn chain(json: &str, mode: Option<&str>) -> *mut TmChain {
    let mode = mode.map(c);
    let mut h = ptr::null_mut();
    let s = tm_chain_new(c(json).as_ptr(), mode.as_ref().map_or(ptr::null(), |m| m.as_ptr()), &mut h);
    assert_eq!(s, TmStatus::Ok);
    h
}

#[test]
fn routes_agree_through_the_handle() {
    unsafe {
        let h = chain(PAIR, None);
        assert_eq!((tm_chain_p(h), tm_chain_n(h)), (2, 2));
        for route in ["brute", "desym", "det"] {
            let mut out = ptr::null_mut();
            assert_eq!(tm_chain_z(h, c(route).as_ptr(), &mut out), TmStatus::Ok);
            assert_eq!(take(out), "4");
        }
        let mut out = ptr::null_mut();
        assert_eq!(tm_chain_moment_matrix(h, &mut out), TmStatus::Ok);
        assert_eq!(take(out), r#"[["7","3"],["4","2"]]"#);
        tm_chain_free(h);
    }
}

#[test]
fn float_mode_override() {
    unsafe {
        let h = chain(PAIR, Some("float"));
        let mut out = ptr::null_mut();
        assert_eq!(tm_chain_z(h, c("det").as_ptr(), &mut out), TmStatus::Ok);
        assert!((take(out).parse::<f64>().unwrap() - 4.0).abs() < 1e-12);
        tm_chain_free(h);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(tm_chain_new(c("{\"n\": ").as_ptr(), ptr::null(), &mut h), TmStatus::Config);
        assert!(h.is_null());
        assert!(last_error().contains("line 1"));

        assert_eq!(tm_chain_new(ptr::null(), ptr::null(), &mut h), TmStatus::NullArgument);
        assert_eq!(tm_chain_new(c(PAIR).as_ptr(), ptr::null(), ptr::null_mut()), TmStatus::NullArgument);

        let h = chain(PAIR, None);
        let mut out = ptr::null_mut();
        assert_eq!(tm_chain_z(h, c("sideways").as_ptr(), &mut out), TmStatus::Config);
        assert!(last_error().contains("sideways"));
        assert_eq!(tm_chain_z(h, c("fock").as_ptr(), &mut out), TmStatus::Config);
        assert!(out.is_null());
        assert_eq!(tm_chain_z(ptr::null(), c("det").as_ptr(), &mut out), TmStatus::NullArgument);

        // a successful call clears the message
        assert_eq!(tm_chain_z(h, c("det").as_ptr(), &mut out), TmStatus::Ok);
        tm_string_free(out);
        assert!(tm_last_error().is_null());
        tm_chain_free(h);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        tm_chain_free(ptr::null_mut());
        tm_string_free(ptr::null_mut());
        assert_eq!(tm_chain_p(ptr::null()), 0);
        assert!(!CStr::from_ptr(tm_version()).to_str().unwrap().is_empty());
    }
}

#[test]
fn run_matches_the_cli_report() {
    unsafe {
        let mut out = ptr::null_mut();
        let s = tm_run(c("compute").as_ptr(), c(PAIR).as_ptr(), ptr::null(), 5, &mut out);
        assert_eq!(s, TmStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["command"], "compute");
        assert_eq!(v["seed"], 5);
        assert_eq!(v["result"]["values"]["det"], "4");
        assert_eq!(v["result"]["agree"], true);

        let bad = r#"{"n": 1, "mode": "float", "measures": [{"atoms": [[1, 1, 1]]}], "routes": ["fock"]}"#;
        let s = tm_run(c("compute").as_ptr(), c(bad).as_ptr(), ptr::null(), -1, &mut out);
        assert_eq!(s, TmStatus::Compute);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(v["result"]["errors"]["fock"].is_string());

        assert_eq!(tm_run(c("explode").as_ptr(), c(PAIR).as_ptr(), ptr::null(), -1, &mut out), TmStatus::Config);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/taumodel.h");
    assert!(header.exists());
    let Ok(status) = Command::new("cc").args(["-std=c99", "-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
