use std::ffi::{CStr, CString};
use std::ptr;

use swred_ffi::*;

fn last_error() -> String {
    let p = swred_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn explicit(n: usize) -> *mut SwredConfiguration {
    let mut c = ptr::null_mut();
    let s = unsafe { swred_explicit_solution(n, 2.0 * std::f64::consts::PI, 1.0, 0.0, &mut c) };
    assert_eq!(s, SwredStatus::Ok);
    assert!(!c.is_null());
    c
}

#[test]
fn version_is_static_and_prefixed() {
    let v = unsafe { CStr::from_ptr(swred_version()) }.to_str().unwrap();
    assert!(v.starts_with("swred "));
    assert_eq!(v, swred::VERSION);
}

#[test]
fn explicit_solution_has_small_residuals() {
    let c = explicit(16);
    let mut r = SwredResiduals::default();
    assert_eq!(unsafe { swred_residuals(c, &mut r) }, SwredStatus::Ok);
    for v in [r.r1_max, r.r2_max, r.r3a_max, r.r3b_max] {
        assert!(v < 1e-12, "{r:?}");
    }
    assert!(r.energy < 1e-24);
    assert!(swred_last_error_message().is_null());
    unsafe { swred_configuration_free(c) };
}

#[test]
fn errors_set_status_and_message() {
    let mut c = ptr::null_mut();
    let s = unsafe { swred_explicit_solution(16, 2.0 * std::f64::consts::PI, 0.3, 0.0, &mut c) };
    assert_eq!(s, SwredStatus::NonPeriodic);
    assert!(c.is_null());
    assert!(last_error().contains("periodic"));

    let s = unsafe { swred_explicit_solution(7, 1.0, 1.0, 0.0, &mut c) };
    assert_eq!(s, SwredStatus::InvalidGrid);

    let mut r = SwredResiduals::default();
    assert_eq!(unsafe { swred_residuals(ptr::null(), &mut r) }, SwredStatus::NullPointer);
    assert!(last_error().contains("null"));

    let mut d = 0i64;
    assert_eq!(unsafe { swred_dimension(0, 0, SwredDimensionCase::Moduli, &mut d) }, SwredStatus::InvalidArgument);

    // the message is cleared by the next successful call
    assert_eq!(unsafe { swred_dimension(2, 0, SwredDimensionCase::Moduli, &mut d) }, SwredStatus::Ok);
    assert!(swred_last_error_message().is_null());
}

#[test]
fn dimensions_match_the_library() {
    for (case, lib) in [
        (SwredDimensionCase::Moduli, swred::linear::DimensionCase::N),
        (SwredDimensionCase::FixedSpinor, swred::linear::DimensionCase::Sigma),
        (SwredDimensionCase::VortexPsi1Zero, swred::linear::DimensionCase::VortexPsi1Zero),
        (SwredDimensionCase::VortexPsi2Zero, swred::linear::DimensionCase::VortexPsi2Zero),
    ] {
        for g in 1..4 {
            let mut d = -1;
            assert_eq!(unsafe { swred_dimension(g, 1, case, &mut d) }, SwredStatus::Ok);
            assert_eq!(d, swred::linear::dimension_formulas(g, 1, lib).unwrap());
        }
    }
}

#[test]
fn fields_round_trip_through_buffers() {
    let c = explicit(8);
    let mut n = 0usize;
    let mut side = 0.0;
    assert_eq!(unsafe { swred_configuration_grid(c, &mut n, &mut side) }, SwredStatus::Ok);
    assert_eq!(n, 8);
    let len = 2 * n * n;
    let mut bufs = vec![vec![0.0; len]; 4];
    for (k, which) in [SwredField::A, SwredField::Psi1, SwredField::Psi2, SwredField::Phi].into_iter().enumerate() {
        assert_eq!(unsafe { swred_configuration_field(c, which, bufs[k].as_mut_ptr(), len) }, SwredStatus::Ok);
    }
    let mut short = vec![0.0; len - 1];
    assert_eq!(
        unsafe { swred_configuration_field(c, SwredField::A, short.as_mut_ptr(), short.len()) },
        SwredStatus::InvalidArgument
    );
    // a = -i c2 / 2
    assert!((bufs[0][0]).abs() < 1e-15 && (bufs[0][1] + 0.5).abs() < 1e-15);

    let mut d = ptr::null_mut();
    let s = unsafe {
        swred_configuration_new(n, side, bufs[0].as_ptr(), bufs[1].as_ptr(), bufs[2].as_ptr(), bufs[3].as_ptr(), &mut d)
    };
    assert_eq!(s, SwredStatus::Ok);
    let mut back = vec![0.0; len];
    unsafe { swred_configuration_field(d, SwredField::Psi2, back.as_mut_ptr(), len) };
    assert_eq!(back, bufs[2]);
    unsafe {
        swred_configuration_free(c);
        swred_configuration_free(d);
        swred_configuration_free(ptr::null_mut());
    }
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("c.txt").to_str().unwrap()).unwrap();
    let c = explicit(8);
    assert_eq!(unsafe { swred_configuration_save(c, path.as_ptr()) }, SwredStatus::Ok);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { swred_configuration_load(path.as_ptr(), &mut d) }, SwredStatus::Ok);
    let mut r = SwredResiduals::default();
    unsafe { swred_residuals(d, &mut r) };
    assert!(r.energy < 1e-20);
    let missing = CString::new(dir.path().join("nope").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { swred_configuration_load(missing.as_ptr(), &mut d) }, SwredStatus::Io);
    unsafe {
        swred_configuration_free(c);
        swred_configuration_free(d);
    }
}

#[test]
fn solve_recovers_from_noise_and_reports_non_convergence() {
    let c = explicit(8);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { swred_perturb(c, 5, 2, 1e-2, &mut p) }, SwredStatus::Ok);

    let mut out = ptr::null_mut();
    let mut sum = SwredSolveSummary::default();
    let s = unsafe { swred_solve(p, SwredMethod::GaussNewton, 1, 1e-30, &mut out, &mut sum) };
    assert_eq!(s, SwredStatus::NoConvergence);
    assert!(out.is_null());
    assert_eq!(sum.iterations, 1);
    assert!(!sum.converged);

    let s = unsafe { swred_solve(p, SwredMethod::GaussNewton, 50, 1e-18, &mut out, &mut sum) };
    assert_eq!(s, SwredStatus::Ok, "{}", last_error());
    assert!(sum.converged && sum.final_energy < 1e-18 && sum.max_residual < 1e-8, "{sum:?}");
    unsafe {
        swred_configuration_free(c);
        swred_configuration_free(p);
        swred_configuration_free(out);
    }
}
