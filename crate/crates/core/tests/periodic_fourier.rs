use std::f64::consts::PI;

use bozdl_core::fourier::PeriodicSignal;
use bozdl_core::single_well::{rotate_min_to_origin, SingleWellProfile};
use bozdl_core::Error;
use num_complex::Complex;

fn samples(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect()
}

#[test]
fn dft_of_mixed_modes() {
    let s = PeriodicSignal::from_samples(&samples(64, |x| -x.cos() + 0.3 * (2.0 * x).sin()), 8).unwrap();
    assert!((s.coeff(1) - Complex::new(-0.5, 0.0)).norm() < 1e-12);
    assert!((s.coeff(2) - Complex::new(0.0, -0.15)).norm() < 1e-12);
    assert!((s.coeff(-2) - Complex::new(0.0, 0.15)).norm() < 1e-12);
    for k in 3..=8 {
        assert!(s.coeff(k).norm() < 1e-12);
    }
}

#[test]
fn cosine_profile_geometry() {
    let p = SingleWellProfile::classify(&PeriodicSignal::cosine(1.0f64), 4096).unwrap();
    assert!((p.x_max() - PI).abs() < 1e-12);
    assert!((p.xi_minus() - PI / 2.0).abs() < 1e-9);
    assert!((p.xi_plus() - 1.5 * PI).abs() < 1e-9);
    assert!((p.u_min() + 1.0).abs() < 1e-12 && (p.u_max() - 1.0).abs() < 1e-12);
    assert!((p.distribution(0.0) - 0.5).abs() < 1e-12);
    assert!((p.x_minus(0.0) - PI / 2.0).abs() < 1e-12);
    assert!((p.x_plus(0.0) - 1.5 * PI).abs() < 1e-12);
}

fn sign_changes(v: &[f64]) -> usize {
    let n = v.len();
    (0..n).filter(|&j| v[j].signum() != v[(j + 1) % n].signum()).count()
}

#[test]
fn classification_agrees_with_dense_scan() {
    for a in [0.1, 0.2, 0.3, 0.4, 0.6] {
        let raw = PeriodicSignal::from_modes(&[Complex::new(-0.5, 0.0), Complex::new(-a / 2.0, 0.0)]).unwrap();
        let (u, _) = rotate_min_to_origin(&raw);
        let n = 100_000;
        let d1: Vec<f64> = (0..n).map(|j| u.derivative(2.0 * PI * (j as f64 + 0.5) / n as f64, 1)).collect();
        let d2: Vec<f64> = (0..n).map(|j| u.derivative(2.0 * PI * (j as f64 + 0.5) / n as f64, 2)).collect();
        let single_well = sign_changes(&d1) == 2 && sign_changes(&d2) == 2;
        let got = SingleWellProfile::classify(&u, 4096);
        assert_eq!(got.is_ok(), single_well, "a = {a}: {:?}", got.err());
        if !single_well {
            assert!(matches!(got, Err(Error::NotSingleWell(_))));
        }
    }
}

fn asymmetric_well() -> PeriodicSignal<f64> {
    let raw = PeriodicSignal::from_modes(&[Complex::new(-0.5, 0.0), Complex::new(0.05, -0.025)]).unwrap();
    rotate_min_to_origin(&raw).0
}

#[test]
fn branch_coefficients_match_dft() {
    let cos = SingleWellProfile::classify(&PeriodicSignal::cosine(1.0f64), 4096).unwrap();
    assert!((cos.fourier_via_branches(1).unwrap() + 0.5).norm() < 1e-8);
    assert!(cos.fourier_via_branches(2).unwrap().norm() < 1e-8);

    let u = asymmetric_well();
    let p = SingleWellProfile::classify(&u, 4096).unwrap();
    assert!(p.closed_form().is_none());
    for k in 1..=3 {
        let got = p.fourier_via_branches(k).unwrap();
        assert!((got - u.coeff(k)).norm() < 1e-8, "k = {k}: {got} vs {}", u.coeff(k));
    }
}

#[test]
fn distribution_integrals() {
    let cos = SingleWellProfile::classify(&PeriodicSignal::cosine(1.0f64), 4096).unwrap();
    assert!((cos.integral_of_f(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((cos.integral_of_f(0.0, 1.0).unwrap() - 1.0 / PI).abs() < 1e-12);
    assert_eq!(cos.integral_of_f(0.3, 0.3).unwrap(), 0.0);
    assert!(matches!(cos.integral_of_f(-2.0, 0.0), Err(Error::RangeError { .. })));

    // ∫_{min}^{max} F = mean(u − min u) = −min u for a zero-mean well.
    let p = SingleWellProfile::classify(&asymmetric_well(), 4096).unwrap();
    let whole = p.integral_of_f(p.u_min(), p.u_max()).unwrap();
    assert!((whole + p.u_min()).abs() < 1e-9, "{whole} vs {}", -p.u_min());
}

#[test]
fn rejects_nonzero_mean_and_coarse_grids() {
    assert!(matches!(
        PeriodicSignal::new(vec![Complex::new(0.1, 0.0), Complex::new(-0.5, 0.0)]),
        Err(Error::NonZeroMean { .. })
    ));
    assert!(matches!(PeriodicSignal::from_samples(&samples(8, f64::cos), 8), Err(Error::GridTooCoarse { .. })));
}

#[test]
fn signal_json_shape() {
    let s = PeriodicSignal::cosine(2.0);
    let v: serde_json::Value = serde_json::to_value(s.to_json()).unwrap();
    assert_eq!(v["K"], 1);
    assert_eq!(v["coeffs"][1][0], -1.0);
}
