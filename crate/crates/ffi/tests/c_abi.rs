//! Exercises the C ABI through the Rust-visible `extern "C"` symbols.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use kepler_resum_ffi::*;

fn ctx() -> *mut KrContext {
    let c = kr_context_new(60);
    assert!(!c.is_null());
    c
}

fn last_error(c: *mut KrContext) -> String {
    let mut needed = 0usize;
    let mut buf = vec![0 as c_char; 512];
    assert_eq!(kr_last_error(c, buf.as_mut_ptr(), buf.len(), &mut needed), KrStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

/// Plain f64 Newton iteration as an independent oracle.
fn newton_f64(eps: f64, m: f64) -> f64 {
    let mut psi = if eps > 0.8 { std::f64::consts::PI } else { m };
    for _ in 0..100 {
        psi -= (psi - eps * psi.sin() - m) / (1.0 - eps * psi.cos());
    }
    psi
}

#[test]
fn precision_below_minimum_yields_null() {
    assert!(kr_context_new(10).is_null());
    let c = ctx();
    assert_eq!(kr_context_digits(c), 60);
    kr_context_free(c);
    kr_context_free(ptr::null_mut());
}

#[test]
fn null_handles_are_reported() {
    let mut out = 0.0;
    assert_eq!(kr_solve_f64(ptr::null_mut(), 0.5, 1.0, KrMethod::Newton, 0, &mut out), KrStatus::NullPointer);
    let c = ctx();
    assert_eq!(kr_solve_f64(c, 0.5, 1.0, KrMethod::Newton, 0, ptr::null_mut()), KrStatus::NullPointer);
    kr_context_free(c);
}

#[test]
fn newton_and_resummed_series_agree_with_double_oracle() {
    let c = ctx();
    for &(eps, m) in &[(0.5, 1.0), (0.9, 2.0), (0.3, 0.1)] {
        let want = newton_f64(eps, m);
        let mut got = 0.0;
        assert_eq!(kr_solve_f64(c, eps, m, KrMethod::Newton, 0, &mut got), KrStatus::Ok);
        assert!((got - want).abs() < 1e-14, "newton {eps} {m}: {got} vs {want}");
        for method in [KrMethod::Levin, KrMethod::Weniger] {
            assert_eq!(kr_solve_f64(c, eps, m, method, 30, &mut got), KrStatus::Ok);
            assert!((got - want).abs() < 1e-6, "{method:?} {eps} {m}: {got} vs {want}");
        }
    }
    kr_context_free(c);
}

#[test]
fn string_solve_reports_buffer_size() {
    let c = ctx();
    let eps = CString::new("1/2").unwrap();
    let m = CString::new("1").unwrap();
    let mut needed = 0usize;
    let mut tiny = [0 as c_char; 4];
    let st = kr_solve(c, eps.as_ptr(), m.as_ptr(), KrMethod::Newton, 0, 40, tiny.as_mut_ptr(), tiny.len(), &mut needed);
    assert_eq!(st, KrStatus::BufferTooSmall);
    assert!(needed > 40);
    let mut buf = vec![0 as c_char; needed];
    let st = kr_solve(c, eps.as_ptr(), m.as_ptr(), KrMethod::Newton, 0, 40, buf.as_mut_ptr(), buf.len(), &mut needed);
    assert_eq!(st, KrStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    let v: f64 = text.parse().unwrap();
    assert!((v - newton_f64(0.5, 1.0)).abs() < 1e-14, "{text}");
    kr_context_free(c);
}

#[test]
fn bad_arguments_map_to_codes_and_messages() {
    let c = ctx();
    let mut out = 0.0;
    assert_eq!(kr_solve_f64(c, 1.5, 1.0, KrMethod::Newton, 0, &mut out), KrStatus::Domain);
    assert!(!last_error(c).is_empty());
    assert_eq!(kr_solve_f64(c, f64::NAN, 1.0, KrMethod::Newton, 0, &mut out), KrStatus::InvalidArgument);
    let junk = CString::new("zebra").unwrap();
    let mut buf = [0 as c_char; 64];
    let st = kr_solve(c, junk.as_ptr(), junk.as_ptr(), KrMethod::Newton, 0, 10, buf.as_mut_ptr(), buf.len(), ptr::null_mut());
    assert_eq!(st, KrStatus::InvalidArgument);
    // success clears the message
    assert_eq!(kr_solve_f64(c, 0.5, 1.0, KrMethod::Newton, 0, &mut out), KrStatus::Ok);
    assert!(last_error(c).is_empty());
    let target = CString::new("table99").unwrap();
    let mut passed = 0;
    assert_eq!(kr_reproduce(c, target.as_ptr(), &mut passed), KrStatus::InvalidArgument);
    kr_context_free(c);
}

#[test]
fn transform_sums_geometric_series_exactly() {
    let c = ctx();
    let terms: Vec<f64> = (0..12).map(|j| 0.5f64.powi(j)).collect();
    for kind in [KrKind::LevinD, KrKind::WenigerDelta] {
        let mut out = 0.0;
        assert_eq!(kr_transform_f64(c, terms.as_ptr(), terms.len(), kind, 4, &mut out), KrStatus::Ok);
        assert!((out - 2.0).abs() < 1e-15, "{kind:?}: {out}");
    }
    kr_context_free(c);
}

#[test]
fn debye_table_coefficients_and_values() {
    let c = ctx();
    let t = kr_debye_new(8);
    assert_eq!(kr_debye_k_max(t), 8);
    let mut buf = [0 as c_char; 64];
    let coeff = |k, m, buf: &mut [c_char; 64]| {
        let st = kr_debye_coeff(c, t, k, m, buf.as_mut_ptr(), buf.len(), ptr::null_mut());
        (st, unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned())
    };
    // U_1(t) = (3t - 5t^3) / 24
    assert_eq!(coeff(1, 1, &mut buf), (KrStatus::Ok, "1/8".to_owned()));
    assert_eq!(coeff(1, 3, &mut buf), (KrStatus::Ok, "-5/24".to_owned()));
    assert_eq!(coeff(1, 9, &mut buf).0, KrStatus::Range);
    assert_eq!(coeff(9, 0, &mut buf).0, KrStatus::Range);
    let mut v = 0.0;
    assert_eq!(kr_debye_eval_f64(c, t, 1, 0.5, &mut v), KrStatus::Ok);
    assert!((v - (1.5 - 0.625) / 24.0).abs() < 1e-16);
    kr_debye_free(t);
    kr_context_free(c);
}

#[test]
fn reproduce_and_selfcheck_report_pass_flags() {
    let c = kr_context_new(250);
    let target = CString::new("table1").unwrap();
    let mut passed = -1;
    assert_eq!(kr_reproduce(c, target.as_ptr(), &mut passed), KrStatus::Ok);
    assert_eq!(passed, 1);
    kr_context_free(c);
    let c = ctx();
    passed = -1;
    assert_eq!(kr_selfcheck(c, &mut passed), KrStatus::Ok);
    assert_eq!(passed, 1);
    kr_context_free(c);
}

#[test]
fn version_and_header_are_present() {
    let v = unsafe { CStr::from_ptr(kr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/kepler_resum.h")).unwrap();
    for name in [
        "kr_context_new", "kr_context_free", "kr_last_error", "kr_solve", "kr_solve_f64",
        "kr_transform_f64", "kr_debye_new", "kr_debye_coeff", "kr_debye_eval_f64",
        "kr_debye_free", "kr_reproduce", "kr_selfcheck", "kr_version", "KR_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
