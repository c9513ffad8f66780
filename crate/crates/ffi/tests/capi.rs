use std::ffi::{CStr, CString};
use std::ptr;

use bidbench_ffi::*;

fn last_error() -> String {
    let p = bb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn synth(auction: &str, n: usize, seed: u64) -> *mut BbDataset {
    let a = CString::new(auction).unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { bb_dataset_synth(a.as_ptr(), n, seed, &mut ds) }, BbStatus::Ok);
    assert!(!ds.is_null());
    ds
}

fn run(ds: *const BbDataset, algo: &str, params: Option<&str>, cpc: Option<&str>) -> (BbStatus, *mut BbReport) {
    let algo = CString::new(algo).unwrap();
    let params = params.map(|s| CString::new(s).unwrap());
    let cpc = cpc.map(|s| CString::new(s).unwrap());
    let mut r = ptr::null_mut();
    let status = unsafe {
        bb_experiment_run(
            ds,
            algo.as_ptr(),
            params.as_ref().map_or(ptr::null(), |p| p.as_ptr()),
            cpc.as_ref().map_or(ptr::null(), |p| p.as_ptr()),
            &mut r,
        )
    };
    (status, r)
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(bb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn bin_of_matches_library_and_rejects_bad_bids() {
    let mut b = 0;
    assert_eq!(unsafe { bb_bin_of(1.2f64.powi(7), 1.2, &mut b) }, BbStatus::Ok);
    assert_eq!(b, 7);
    assert!(bb_last_error().is_null());
    assert_eq!(unsafe { bb_bin_of(-1.0, 1.2, &mut b) }, BbStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { bb_bin_of(5.0, 1.2, ptr::null_mut()) }, BbStatus::NullPointer);
}

#[test]
fn synth_write_load_roundtrip() {
    let ds = synth("fp", 12, 3);
    let mut n = 0;
    assert_eq!(unsafe { bb_dataset_n_campaigns(ds, &mut n) }, BbStatus::Ok);
    assert_eq!(n, 12);
    let mut passed = false;
    assert_eq!(unsafe { bb_dataset_validate(ds, &mut passed) }, BbStatus::Ok);
    assert!(passed);

    let dir = tempfile::tempdir().unwrap();
    let cdir = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { bb_dataset_write(ds, cdir.as_ptr()) }, BbStatus::Ok);
    let fp = CString::new("fp").unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { bb_dataset_load(cdir.as_ptr(), fp.as_ptr(), &mut back) }, BbStatus::Ok);

    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { bb_dataset_describe_json(ds, &mut a) }, BbStatus::Ok);
    assert_eq!(unsafe { bb_dataset_describe_json(back, &mut b) }, BbStatus::Ok);
    let (ja, jb) = unsafe { (CStr::from_ptr(a), CStr::from_ptr(b)) };
    let v: serde_json::Value = serde_json::from_str(ja.to_str().unwrap()).unwrap();
    assert_eq!(v["n_campaigns"], 12);
    assert_eq!(v, serde_json::from_str::<serde_json::Value>(jb.to_str().unwrap()).unwrap());
    unsafe {
        bb_string_free(a);
        bb_string_free(b);
        bb_dataset_free(back);
        bb_dataset_free(ds);
    }
}

#[test]
fn load_errors_carry_status_and_message() {
    let dir = CString::new("/nonexistent/bidbench").unwrap();
    let vcg = CString::new("vcg").unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { bb_dataset_load(dir.as_ptr(), vcg.as_ptr(), &mut ds) }, BbStatus::Io);
    assert!(last_error().contains("/nonexistent/bidbench"));
    assert!(ds.is_null());
    let bad = CString::new("english").unwrap();
    assert_eq!(unsafe { bb_dataset_load(dir.as_ptr(), bad.as_ptr(), &mut ds) }, BbStatus::InvalidArgument);
    assert_eq!(unsafe { bb_dataset_load(ptr::null(), vcg.as_ptr(), &mut ds) }, BbStatus::NullPointer);
}

#[test]
fn experiment_report_agrees_with_json() {
    let ds = synth("vcg", 10, 8);
    let (status, r) = run(ds, "tapid", Some(r#"{"b0": 3000, "kp": 0.2}"#), None);
    assert_eq!(status, BbStatus::Ok, "{}", last_error());
    let (mut scr, mut rmse) = (0.0, 0.0);
    assert_eq!(unsafe { bb_report_scr(r, &mut scr) }, BbStatus::Ok);
    assert_eq!(unsafe { bb_report_rmse_t(r, &mut rmse) }, BbStatus::Ok);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { bb_report_json(r, &mut json) }, BbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    assert_eq!(v["scr"].as_f64().unwrap(), scr);
    assert_eq!(v["rmse_t"].as_f64().unwrap(), rmse);
    assert_eq!(v["algorithm"], "TA-PID");
    assert_eq!(v["n_campaigns"], 10);
    assert!(scr > 0.0);

    // same inputs give the same report
    let (_, r2) = run(ds, "tapid", Some(r#"{"b0": 3000, "kp": 0.2}"#), None);
    let mut scr2 = 0.0;
    unsafe { bb_report_scr(r2, &mut scr2) };
    assert_eq!(scr, scr2);
    unsafe {
        bb_string_free(json);
        bb_report_free(r);
        bb_report_free(r2);
        bb_dataset_free(ds);
    }
}

#[test]
fn rel_cpc_is_defined_or_reported_undefined() {
    let ds = synth("fp", 6, 2);
    let (status, r) = run(ds, "broi", None, Some("category-div-10"));
    assert_eq!(status, BbStatus::Ok);
    let mut v = f64::NAN;
    let s = unsafe { bb_report_rel_cpc(r, &mut v) };
    assert!(s == BbStatus::Ok && v.is_finite() && v >= 0.0 || s == BbStatus::Undefined);
    unsafe { bb_report_free(r) };

    // a bid far below every bin wins nothing
    let (status, r) = run(ds, "alm", Some(r#"{"b0": 0.001, "beta": 0}"#), None);
    assert_eq!(status, BbStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { bb_report_rel_cpc(r, &mut v) }, BbStatus::Undefined);
    unsafe {
        bb_report_free(r);
        bb_dataset_free(ds);
    }
}

#[test]
fn experiment_argument_errors() {
    let ds = synth("vcg", 3, 1);
    assert_eq!(run(ds, "nope", None, None).0, BbStatus::UnknownAlgorithm);
    assert_eq!(run(ds, "alm", Some("{not json"), None).0, BbStatus::Parse);
    assert_eq!(run(ds, "alm", Some(r#"{"kp": 1}"#), None).0, BbStatus::InvalidArgument);
    assert!(last_error().contains("kp"));
    assert_eq!(run(ds, "alm", Some(r#"{"b0": "big"}"#), None).0, BbStatus::InvalidArgument);
    assert_eq!(run(ds, "alm", None, Some("fixed:-3")).0, BbStatus::InvalidArgument);
    assert_eq!(run(ptr::null(), "alm", None, None).0, BbStatus::NullPointer);
    unsafe { bb_dataset_free(ds) };
}

#[test]
fn free_accepts_null() {
    unsafe {
        bb_dataset_free(ptr::null_mut());
        bb_report_free(ptr::null_mut());
        bb_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bidbench.h")).unwrap();
    for f in [
        "bb_last_error",
        "bb_version",
        "bb_string_free",
        "bb_bin_of",
        "bb_dataset_load",
        "bb_dataset_synth",
        "bb_dataset_write",
        "bb_dataset_free",
        "bb_dataset_n_campaigns",
        "bb_dataset_validate",
        "bb_dataset_describe_json",
        "bb_experiment_run",
        "bb_report_scr",
        "bb_report_rmse_t",
        "bb_report_rel_cpc",
        "bb_report_json",
        "bb_report_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f}");
    }
    assert!(h.contains("typedef struct BbDataset BbDataset;"));
    assert!(h.contains("BB_STATUS_PANIC = 9"));
}
