mod common;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinchlab::oracle::bubble::{bubble_alpha, bubble_landau, bubble_threshold};
use pinchlab::oracle::morse::morse_sample;
use pinchlab::oracle::*;
use pinchlab::pinch::PinchError;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn residue_examples() {
    let v = residue_kernel(c(1.0, 0.0), c(-1.0, 0.0), 1.0, 256).unwrap();
    assert!((v - c(0.0, PI)).norm() < 1e-12);
    assert!(matches!(residue_kernel(c(1.0, 1.0), c(1.0, 1.0), 0.5, 64), Err(OracleError::ContourAmbiguous(_))));
    let (xi, eta) = (c(2.0, 1.0), c(-3.0, 0.0));
    let v = residue_kernel(xi, eta, 0.5 * (xi - eta).norm(), 512).unwrap();
    let exact = residue_kernel_exact(xi, eta);
    assert!((v - exact).norm() < 1e-8 * exact.norm());
    // a contour wider than the pole separation would enclose both
    assert!(matches!(residue_kernel(xi, eta, 10.0, 64), Err(OracleError::ContourAmbiguous(_))));
}

#[test]
fn residue_trapezoid_rate() {
    let (xi, eta) = (c(0.3, -0.2), c(1.1, 0.4));
    let r = 0.8 * (xi - eta).norm();
    let exact = residue_kernel_exact(xi, eta);
    let errs: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| (residue_kernel(xi, eta, r, n).unwrap() - exact).norm())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] * 4.0 <= w[0], "{:?}", errs);
    }
}

fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = common::rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * 0.5
}

fn morse_eps() -> Vec<f64> {
    geometric_eps(1e-1, 1e-4, 7)
}

#[test]
fn morse_slopes() {
    for n in [1usize, 3, 4, 5] {
        for q in [identity(n), random_spd(n, 10 + n as u64), random_spd(n, 20 + n as u64)] {
            let chk = morse_check(&q, &morse_eps(), 1.0).unwrap();
            assert!((chk.slope_fit.slope - chk.predicted_exponent).abs() < 0.02, "n={} {:?}", n, chk.slope_fit);
            // the measured coefficient follows the Gamma-function value
            let rel = (chk.coefficient_measured - chk.coefficient_exact).abs() / chk.coefficient_exact;
            assert!(rel < 1e-3, "n={} measured {} exact {}", n, chk.coefficient_measured, chk.coefficient_exact);
        }
    }
}

#[test]
fn morse_coefficient_differs_from_sphere_volume() {
    let chk = morse_check(&identity(3), &morse_eps(), 1.0).unwrap();
    // singular part -2 pi^2 eps^{1/2}: |coefficient| is pi/2 times V_2(1) = 4 pi
    assert!((chk.coefficient_predicted - 4.0 * PI).abs() < 1e-12);
    assert!((chk.coefficient_measured / chk.coefficient_predicted - PI / 2.0).abs() < 1e-3);
    assert!(chk.samples.iter().all(|s| s.singular < 0.0));
}

#[test]
fn morse_one_dimensional() {
    let q = DMatrix::from_element(1, 1, 4.0);
    let eps = 0.01;
    let cutoff = 1e3;
    let v = morse_integral(&q, eps, cutoff).unwrap();
    // ∫_{|y| < R/2} dy/(eps + 4 y^2)
    let closed = (cutoff / eps.sqrt()).atan() / eps.sqrt();
    assert!((v - closed).abs() < 1e-9 * closed);
    assert!((v - PI / (2.0 * eps.sqrt())).abs() < 2.0 / cutoff);
}

#[test]
fn morse_logarithmic_case() {
    let chk = morse_check(&identity(2), &morse_eps(), 1.0).unwrap();
    let lf = chk.log_fit.as_ref().unwrap();
    assert!(chk.slope_fit.r_squared < 0.999, "power law r2 {}", chk.slope_fit.r_squared);
    assert!(lf.r_squared >= 0.99);
    assert!((lf.b + PI).abs() < 1e-6, "b = {}", lf.b);
}

#[test]
fn morse_rejects_indefinite() {
    let q = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(morse_integral(&q, 0.1, 1.0), Err(OracleError::NotPositiveDefinite)));
    let ns = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    assert!(matches!(morse_integral(&ns, 0.1, 1.0), Err(OracleError::InvalidInput(_))));
    assert!(morse_integral(&identity(6), 0.1, 1.0).is_err());
    let s = morse_sample(&identity(3), 0.1, 1.0).unwrap();
    assert!((s.value - s.regular - s.singular).abs() < 1e-15);
}

fn samples(f: impl Fn(f64) -> f64, hi: f64, lo: f64, n: usize) -> Vec<(f64, Complex64)> {
    geometric_eps(hi, lo, n).into_iter().map(|e| (e, c(f(e), 0.0))).collect()
}

#[test]
fn fit_examples() {
    let f = fit_slope(&samples(|e| e * e, 1e-1, 1e-4, 7)).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-9 && (f.r_squared - 1.0).abs() < 1e-12);
    let f = fit_slope(&samples(|_| 3.5, 1e-1, 1e-4, 7)).unwrap();
    assert!(f.slope.abs() < 1e-9);
    assert!((f.intercept - 3.5f64.ln()).abs() < 1e-12);
    let f = fit_slope(&samples(|e| e.sqrt() * (1.0 + 0.1 * e), 1e-2, 1e-4, 9)).unwrap();
    assert!((f.slope - 0.5).abs() < 0.01);
    let l = fit_log(&samples(|e| 2.0 - 0.7 * e.ln(), 1e-1, 1e-4, 6)).unwrap();
    assert!((l.b + 0.7).abs() < 1e-12 && (l.a - 2.0).abs() < 1e-12);
}

#[test]
fn fit_rejects_degenerate() {
    let bad = [
        samples(|e| e, 1e-1, 1e-4, 4),
        samples(|e| e, 1e-1, 2e-3, 6),
        samples(|_| 0.0, 1e-1, 1e-4, 6),
    ];
    for s in &bad {
        assert!(matches!(fit_slope(s), Err(OracleError::DegenerateSamples(_))));
    }
    let mut inc = samples(|e| e, 1e-1, 1e-4, 6);
    inc.reverse();
    assert!(matches!(fit_slope(&inc), Err(OracleError::DegenerateSamples(_))));
    assert!(matches!(fit_log(&inc), Err(OracleError::DegenerateSamples(_))));
}

#[test]
fn bubble_paths_agree() {
    let mut r = common::rng(7);
    for d in [3u32, 5] {
        for _ in 0..10 {
            let m0 = r.gen_range(0.5..2.0);
            let m1 = r.gen_range(0.5..2.0);
            let sstar = bubble_threshold(m0, m1);
            let s = if r.gen_bool(0.5) {
                c(r.gen_range(0.5..5.0), r.gen_range(-1.0..1.0))
            } else {
                // off the threshold in the complex plane
                c(sstar, 0.0) + Complex64::from_polar(r.gen_range(0.3..2.0), r.gen_range(0.3..PI - 0.3))
            };
            let a = bubble_numeric(s, m0, m1, d).unwrap();
            let b = bubble_direct(s, m0, m1, d).unwrap();
            assert!((a - b).norm() < 1e-3 * a.norm(), "d={} s={} m=({}, {}) {} vs {}", d, s, m0, m1, a, b);
        }
    }
}

#[test]
fn bubble_closed_form_at_d3() {
    // d = 3: F(s) = 2 pi^2 / sqrt(s) * atan(sqrt(s)/(m0+m1)) for s > 0 (the
    // standard three-dimensional bubble), used here as an outside reference
    for (s, m0, m1) in [(1.0f64, 1.0f64, 1.0f64), (3.0, 0.5, 2.0), (0.2, 1.5, 0.7)] {
        let v = bubble_numeric(c(s, 0.0), m0 * m0, m1 * m1, 3).unwrap();
        let exact = 2.0 * PI * PI / s.sqrt() * (s.sqrt() / (m0 + m1)).atan();
        assert!((v.re - exact).abs() < 1e-9 * exact && v.im.abs() < 1e-9 * exact, "{} vs {}", v, exact);
    }
}

#[test]
fn bubble_pinch_inputs() {
    assert!(matches!(
        bubble_numeric(c(0.0, 0.0), 1.0, 1.0, 5),
        Err(OracleError::Pinch(PinchError::PoleAtPoint(_)))
    ));
    assert!(matches!(bubble_numeric(c(1.0, 0.0), 1.0, 1.0, 4), Err(OracleError::NonConvergent(_))));
    assert!(matches!(bubble_numeric(c(1.0, 0.0), 1.0, 1.0, 7), Err(OracleError::NonConvergent(_))));
    let a = bubble_alpha(c(2.0, 0.0), 1.0, 3.0).unwrap();
    assert!((a - c(-(2.0 + 3.0 - 1.0) / 4.0, 0.0)).norm() < 1e-14);
    let sstar = bubble_threshold(1.0, 4.0);
    assert_eq!(sstar, -9.0);
    assert!(bubble_landau(c(sstar, 0.0), 1.0, 4.0).unwrap().norm() < 1e-9);
    assert!(bubble_landau(c(-1.0, 0.0), 1.0, 4.0).unwrap().norm() < 1e-9);
    assert!(bubble_landau(c(-4.0, 0.0), 1.0, 4.0).unwrap().norm() > 1e-3);
}

#[test]
fn bubble_threshold_scaling() {
    let eps = geometric_eps(1e-2, 1e-4, 7);
    let s5 = bubble_scan(1.0, 1.0, 5, PI / 2.0, &eps).unwrap();
    let f = s5.slope_fit.as_ref().unwrap();
    assert!((f.slope - 1.0).abs() < 0.05 && f.r_squared >= 0.999, "{:?}", f);
    assert!(s5.accepted(0.05, 0.999));
    assert!(!s5.logarithmic_candidate);
    assert_eq!(s5.exponent, "1");
    let s3 = bubble_scan(1.0, 1.0, 3, PI / 2.0, &eps).unwrap();
    assert!(s3.logarithmic_candidate);
    assert!(s3.accepted(0.05, 0.999));
    let lf = s3.log_fit.as_ref().unwrap();
    assert!(lf.r_squared >= 0.99 && lf.b.abs() > 0.1);
    assert!(matches!(bubble_scan(1.0, 1.0, 5, 0.0, &eps), Err(OracleError::InvalidInput(_))));
}

fn small_mc() -> McConfig {
    McConfig { samples: 60_000, block_size: 4096, ..McConfig::default() }
}

#[test]
fn qed_scaling_and_determinism() {
    let cfg = small_mc();
    let a = qed_reduced_numeric(2e-3, 3, &cfg).unwrap();
    let b = qed_reduced_numeric(1e-3, 3, &cfg).unwrap();
    let ratio = b.mean / a.mean;
    let tol = 3.0 * ratio * ((a.std_err / a.mean).powi(2) + (b.std_err / b.mean).powi(2)).sqrt() + 0.02;
    assert!((ratio - 2.0).abs() < tol, "ratio {} tol {}", ratio, tol);
    let again = qed_reduced_numeric(2e-3, 3, &cfg).unwrap();
    assert_eq!(a.mean.to_bits(), again.mean.to_bits());
    assert_eq!(a.std_err.to_bits(), again.std_err.to_bits());
    let other = qed_reduced_numeric(2e-3, 3, &McConfig { seed: 1, ..cfg }).unwrap();
    assert_ne!(a.mean.to_bits(), other.mean.to_bits());
}

#[test]
fn qed_block_layout_does_not_matter_for_reproducibility() {
    // same seed and block size: identical regardless of how often it runs
    let cfg = McConfig { samples: 10_000, block_size: 1000, ..McConfig::default() };
    let runs: Vec<u64> = (0..3).map(|_| qed_reduced_numeric(1e-2, 3, &cfg).unwrap().mean.to_bits()).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn qed_rejects_bad_input() {
    let cfg = small_mc();
    assert!(matches!(qed_reduced_numeric(0.0, 3, &cfg), Err(OracleError::InvalidInput(_))));
    assert!(matches!(qed_reduced_numeric(1e-2, 4, &cfg), Err(OracleError::InvalidInput(_))));
    assert!(matches!(
        qed_reduced_numeric(1e-2, 3, &McConfig { kappa: 0.0, ..cfg }),
        Err(OracleError::InvalidInput(_))
    ));
    let tiny = McConfig { samples: 2, block_size: 2, kappa: 1e-4, ..McConfig::default() };
    let r = (0..20u64).map(|seed| qed_reduced_numeric(1e-2, 3, &McConfig { seed, ..tiny })).find(|r| r.is_err());
    assert!(matches!(r, Some(Err(OracleError::InsufficientSamples { .. }))));
}

#[test]
fn qed_scan_slope() {
    let chk = qed_scan(3, &McConfig { samples: 100_000, ..McConfig::default() }, 7).unwrap();
    assert!((chk.fit.slope + 1.0).abs() < 0.1, "{:?}", chk.fit.slope);
    assert_eq!(chk.predicted_exponent, -1.0);
}
