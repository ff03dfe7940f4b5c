use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hypercap_ffi::*;

fn from_json(text: &str) -> (HcStatus, *mut HcPolynomial) {
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    let s = unsafe { hc_polynomial_from_json(c.as_ptr(), &mut p) };
    (s, p)
}

fn last_error() -> String {
    let m = hc_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip() {
    let j3 = [1.0 / 3.0; 9];
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(hc_polynomial_from_matrix(j3.as_ptr(), 3, &mut p), HcStatus::Ok);
        assert_eq!(hc_polynomial_num_vars(p), 3);

        let mut v = 0.0;
        assert_eq!(hc_polynomial_eval(p, [1.0, 2.0, 3.0].as_ptr(), 3, &mut v), HcStatus::Ok);
        assert!((v - 8.0).abs() < 1e-12);

        let mut per = 0.0;
        let mut text = ptr::null_mut();
        assert_eq!(hc_permanent(p, &mut per, &mut text), HcStatus::Ok);
        // entries are doubles, so the value is the exact permanent of the rounded 1/3
        let t: f64 = CStr::from_ptr(text).to_str().unwrap().parse().unwrap();
        assert!((t - 2.0 / 9.0).abs() < 1e-15 && t == per);
        hc_string_free(text);

        // mixed form at the unit vectors is the x1 x2 x3 coefficient
        let eye = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let mut c = 0.0;
        assert_eq!(hc_mixed_form(p, eye.as_ptr(), &mut c), HcStatus::Ok);
        assert!((c - per).abs() < 1e-9, "{c} vs {per}");

        let mut report = HcCapacityReport { cap_estimate: 0.0, gap_bound: 0.0, iterations: 0, status: HcCapacityStatus::BudgetExhausted };
        let mut y = [f64::NAN; 3];
        assert_eq!(hc_capacity(p, 1e-8, &mut report, y.as_mut_ptr()), HcStatus::Ok);
        assert_eq!(report.status, HcCapacityStatus::Converged);
        assert!((report.cap_estimate - 1.0).abs() < 1e-8);
        assert!(report.gap_bound <= 1e-8);
        assert!(y.iter().sum::<f64>().abs() < 1e-9);

        let mut a = HcApproximation { estimate: 0.0, coefficient_lower: 0.0, coefficient_upper: 0.0, factor: 0.0, derivatives_taken: 0 };
        assert_eq!(hc_approximate_coefficient(p, 0, &mut a), HcStatus::Ok);
        assert!(a.coefficient_lower <= 2.0 / 9.0 + 1e-12 && 2.0 / 9.0 <= a.coefficient_upper + 1e-12);
        hc_polynomial_free(p);
    }
}

#[test]
fn tuple_mixed_discriminant() {
    let (s, p) = from_json(r#"{"kind":"tuple","n":2,"matrices":[{"re":[[2,1],[1,2]]},{"re":[[1,0],[0,3]]}]}"#);
    assert_eq!(s, HcStatus::Ok);
    let mut v = 0.0;
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(hc_mixed_discriminant(p, &mut v, &mut text), HcStatus::Ok);
        // tr A tr B - tr AB = 16 - 8
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "8");
        assert_eq!(v, 8.0);
        hc_string_free(text);
        assert_eq!(hc_permanent(p, ptr::null_mut(), ptr::null_mut()), HcStatus::WrongKind);
        hc_polynomial_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let (s, p) = from_json("not json");
    assert_eq!(s, HcStatus::InvalidInput);
    assert!(p.is_null());
    assert!(last_error().contains("malformed JSON"));

    let (s, _) = from_json(r#"{"kind":"matrix","n":2,"entries":[[0,0],[1,1]]}"#);
    assert_eq!(s, HcStatus::InvalidInput);
    assert!(last_error().contains("row 0"));

    unsafe {
        assert_eq!(hc_polynomial_eval(ptr::null(), ptr::null(), 0, ptr::null_mut()), HcStatus::NullPointer);
        assert_eq!(hc_polynomial_from_json(ptr::null(), ptr::null_mut()), HcStatus::NullPointer);
        assert_eq!(hc_polynomial_num_vars(ptr::null()), 0);
        hc_polynomial_free(ptr::null_mut());
        hc_string_free(ptr::null_mut());
    }

    let (_, p) = from_json(r#"{"kind":"matrix","n":2,"entries":[[1,1],[1,1]]}"#);
    let mut v = 0.0;
    unsafe {
        assert_eq!(hc_polynomial_eval(p, [1.0].as_ptr(), 1, &mut v), HcStatus::InvalidInput);
        let mut r = HcCapacityReport { cap_estimate: 0.0, gap_bound: 0.0, iterations: 0, status: HcCapacityStatus::Converged };
        assert_eq!(hc_capacity(p, -1.0, &mut r, ptr::null_mut()), HcStatus::InvalidInput);
        // a successful call clears the message
        assert_eq!(hc_polynomial_eval(p, [1.0, 1.0].as_ptr(), 2, &mut v), HcStatus::Ok);
        assert!(hc_last_error_message().is_null());
        hc_polynomial_free(p);
    }
}

#[test]
fn status_names() {
    let name = |s| unsafe { CStr::from_ptr(hc_status_name(s)) }.to_str().unwrap().to_owned();
    assert_eq!(name(HcStatus::Ok), "ok");
    assert_eq!(name(HcStatus::BudgetExceeded), "budget exceeded");
    assert_eq!(unsafe { CStr::from_ptr(hc_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hypercap.h")).unwrap();
    for name in ["hc_polynomial_from_json", "hc_capacity", "hc_permanent", "hc_last_error_message", "HC_STATUS_WRONG_KIND"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compile the C smoke test against the header and the static library.
#[test]
fn c_smoke_test() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // tests/ffi-<hash> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libhypercap_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
