use std::ffi::{CStr, CString};
use std::ptr;

use engel_vfg_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = evfg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    evfg_string_free(p);
    s
}

#[test]
fn algebra_and_units_round_trip() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(evfg_algebra_new(c("D4").as_ptr(), c("2").as_ptr(), &mut alg), EvfgStatus::Ok);
        let mut dim = 0usize;
        assert_eq!(evfg_algebra_dimension(alg, &mut dim), EvfgStatus::Ok);
        assert_eq!(dim, 8);
        let mut predicted = false;
        assert_eq!(evfg_algebra_predict(alg, &mut predicted), EvfgStatus::Ok);
        assert!(predicted);

        let mut units = ptr::null_mut();
        assert_eq!(evfg_units_enumerate(alg, 1 << 22, &mut units), EvfgStatus::Ok);
        let mut order = 0u64;
        assert_eq!(evfg_units_order(units, &mut order), EvfgStatus::Ok);
        assert_eq!(order, 128);
        let mut engel = false;
        assert_eq!(evfg_units_is_engel(units, &mut engel), EvfgStatus::Ok);
        assert!(engel);
        let (mut nilpotent, mut class) = (false, 0usize);
        assert_eq!(evfg_units_nilpotency_class(units, &mut nilpotent, &mut class), EvfgStatus::Ok);
        assert!(nilpotent && class >= 2);
        evfg_units_free(units);
        evfg_algebra_free(alg);
    }
}

#[test]
fn non_engel_case() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(evfg_algebra_new(c("S3").as_ptr(), c("5").as_ptr(), &mut alg), EvfgStatus::Ok);
        let mut units = ptr::null_mut();
        assert_eq!(evfg_units_enumerate(alg, 1 << 22, &mut units), EvfgStatus::Ok);
        let mut engel = true;
        assert_eq!(evfg_units_is_engel(units, &mut engel), EvfgStatus::Ok);
        assert!(!engel);
        let (mut nilpotent, mut class) = (true, 7usize);
        assert_eq!(evfg_units_nilpotency_class(units, &mut nilpotent, &mut class), EvfgStatus::Ok);
        assert!(!nilpotent);
        assert_eq!(class, 7);
        evfg_units_free(units);
        evfg_algebra_free(alg);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(evfg_algebra_new(c("S3").as_ptr(), c("6").as_ptr(), &mut alg), EvfgStatus::InvalidArgument);
        assert!(alg.is_null());
        assert!(last_error().contains("prime power"), "{}", last_error());
        assert_eq!(evfg_algebra_new(ptr::null(), c("2").as_ptr(), &mut alg), EvfgStatus::NullPointer);
        assert_eq!(evfg_algebra_new(c("Z9").as_ptr(), c("2").as_ptr(), &mut alg), EvfgStatus::InvalidArgument);

        assert_eq!(evfg_algebra_new(c("C12").as_ptr(), c("4").as_ptr(), &mut alg), EvfgStatus::Ok);
        let mut units = ptr::null_mut();
        assert_eq!(evfg_units_enumerate(alg, 1000, &mut units), EvfgStatus::BudgetExceeded);
        assert!(units.is_null());
        assert_eq!(evfg_units_enumerate(alg, 0, &mut units), EvfgStatus::InvalidArgument);
        let mut dim = 0usize;
        assert_eq!(evfg_algebra_dimension(alg, &mut dim), EvfgStatus::Ok);
        assert!(evfg_last_error().is_null());
        assert_eq!(evfg_algebra_dimension(ptr::null(), &mut dim), EvfgStatus::NullPointer);
        assert_eq!(evfg_algebra_dimension(alg, ptr::null_mut()), EvfgStatus::NullPointer);
        evfg_algebra_free(alg);
        evfg_algebra_free(ptr::null_mut());
        evfg_string_free(ptr::null_mut());
    }
}

#[test]
fn json_entry_points() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(evfg_analyze_json(c("S3").as_ptr(), c("2").as_ptr(), 1000, 42, &mut out), EvfgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["observed"]["engel"]["engel"], false);

        let config = c(r#"{"max_group_order": 4, "fields": ["2", "3"], "samples": 500}"#);
        let mut failures = usize::MAX;
        assert_eq!(evfg_run_suite_json(config.as_ptr(), &mut out, &mut failures), EvfgStatus::Ok);
        assert_eq!(failures, 0);
        let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert_eq!(doc["cases"].as_array().unwrap().len(), 2 * 5);
        assert_eq!(doc["config"]["seed"], 42);

        let bad = c(r#"{"fields": ["6"]}"#);
        assert_eq!(evfg_run_suite_json(bad.as_ptr(), &mut out, ptr::null_mut()), EvfgStatus::InvalidArgument);
        let bad = c("{not json");
        assert_eq!(evfg_run_suite_json(bad.as_ptr(), &mut out, ptr::null_mut()), EvfgStatus::InvalidArgument);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(evfg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated_and_compiles() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/engel_vfg.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["evfg_algebra_new", "evfg_units_is_engel", "evfg_run_suite_json", "evfg_string_free", "EVFG_STATUS_BUDGET_EXCEEDED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    assert!(text.contains("typedef struct EvfgAlgebra EvfgAlgebra;"));

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"engel_vfg.h\"\nint main(void) { EvfgAlgebra *a = 0; size_t n = 0;\n\
         EvfgStatus s = evfg_algebra_new(\"C2\", \"2\", &a); evfg_algebra_dimension(a, &n); evfg_algebra_free(a); return s; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .expect("a C compiler is required for the header check");
    assert!(status.success());
}
