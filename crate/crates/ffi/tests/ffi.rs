use std::ffi::{CStr, CString};
use std::ptr;

use meridian_ffi::*;

const CASE_II: &str = r#"{"surface": {"family": "meridian", "curve": {"kind": "circle", "kappa": 2.0},
    "profile": {"kind": "line", "theta": 0.9, "f0": 1.0}},
    "grid": {"u": [0.0, 2.0, 4], "v": [0.0, 6.0, 4]}}"#;

const SPHERE_WITH_POLE: &str = r#"{"surface": {"family": "meridian", "curve": {"kind": "great_circle"},
    "profile": {"kind": "sphere_arc"}},
    "grid": {"u": [0.0, 1.0, 5], "v": [0, 1, 3]}}"#;

fn surface(json: &str) -> *mut MsSurface {
    let text = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { ms_surface_from_json(text.as_ptr(), &mut s) },
        MsStatus::Ok
    );
    assert!(!s.is_null());
    s
}

fn last_error() -> Option<String> {
    let p = ms_last_error_message();
    if p.is_null() {
        return None;
    }
    let msg = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ms_string_free(p) };
    Some(msg)
}

#[test]
fn evaluate_matches_closed_form() {
    let s = surface(SPHERE_WITH_POLE);
    let mut r = MsPointReport::default();
    assert_eq!(
        unsafe { ms_surface_evaluate(s, 0.7, 0.3, &mut r) },
        MsStatus::Ok
    );
    assert!(last_error().is_none());
    assert!((r.k - 1.0).abs() < 1e-9);
    assert!((r.e - 1.0).abs() < 1e-12);
    assert!((r.g - 0.7f64.sin().powi(2)).abs() < 1e-12);
    assert!(r.sp_residual < 1e-9);
    unsafe { ms_surface_free(s) };
}

#[test]
fn pole_is_a_domain_error() {
    let s = surface(SPHERE_WITH_POLE);
    let mut r = MsPointReport::default();
    assert_eq!(
        unsafe { ms_surface_evaluate(s, 0.0, 0.0, &mut r) },
        MsStatus::Domain
    );
    assert!(last_error().is_some());
    unsafe { ms_surface_free(s) };
}

#[test]
fn classify_reports_case_and_branch() {
    let s = surface(CASE_II);
    assert!(unsafe { ms_surface_is_meridian(s) });
    assert_eq!(unsafe { ms_surface_grid_len(s) }, 16);
    let mut c = std::mem::MaybeUninit::<MsClassification>::uninit();
    assert_eq!(
        unsafe { ms_surface_classify(s, c.as_mut_ptr()) },
        MsStatus::Ok
    );
    let c = unsafe { c.assume_init() };
    assert_eq!((c.case_, c.branch), (MsCase::CaseII, MsBranch::BranchCaseI));
    assert!(c.semi_parallel && c.kappa_alpha_is_zero && !c.kappa_is_zero);
    unsafe { ms_surface_free(s) };
}

#[test]
fn immersion_is_not_a_meridian() {
    let s = surface(
        r#"{"surface": {"family": "immersion", "immersion": "clifford_torus"}, "grid": {"u": [0, 1, 3], "v": [0, 1, 3]}}"#,
    );
    assert!(!unsafe { ms_surface_is_meridian(s) });
    let mut c = std::mem::MaybeUninit::<MsClassification>::uninit();
    assert_eq!(
        unsafe { ms_surface_classify(s, c.as_mut_ptr()) },
        MsStatus::NotAMeridian
    );
    unsafe { ms_surface_free(s) };
}

#[test]
fn analyze_csv_round_trip() {
    let s = surface(SPHERE_WITH_POLE);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ms_surface_analyze_csv(s, &mut out) }, MsStatus::Ok);
    let csv = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { ms_string_free(out) };
    assert!(csv.starts_with("u,v,"));
    assert!(csv.contains("# rows_emitted=12\n"));
    assert!(csv.contains("# rows_skipped=3\n"));
    unsafe { ms_surface_free(s) };
}

#[test]
fn bad_input_sets_status_and_message() {
    let mut s = ptr::null_mut();
    let bad = CString::new(r#"{"surface": {"family": "meridian"}}"#).unwrap();
    assert_eq!(
        unsafe { ms_surface_from_json(bad.as_ptr(), &mut s) },
        MsStatus::Config
    );
    assert!(s.is_null());
    assert!(!last_error().unwrap().is_empty());

    assert_eq!(
        unsafe { ms_surface_from_json(ptr::null(), &mut s) },
        MsStatus::NullPointer
    );
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { ms_surface_from_json(invalid.as_ptr().cast(), &mut s) },
        MsStatus::InvalidUtf8
    );

    let mut r = MsPointReport::default();
    assert_eq!(
        unsafe { ms_surface_evaluate(ptr::null(), 0.0, 0.0, &mut r) },
        MsStatus::NullPointer
    );
    unsafe { ms_surface_free(ptr::null_mut()) };
    unsafe { ms_string_free(ptr::null_mut()) };
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(ms_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/meridian_ffi.h"
    ))
    .unwrap();
    for name in [
        "ms_surface_from_json",
        "ms_surface_evaluate",
        "ms_surface_classify",
        "MS_STATUS_NOT_A_MERIDIAN",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
