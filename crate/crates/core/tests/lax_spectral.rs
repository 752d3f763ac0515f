use std::f64::consts::PI;

use bozdl_core::fourier::PeriodicSignal;
use bozdl_core::lax::{
    a_n_closed_form, build_lax_matrix, diagonalize, diagonalize_auto, invert, an_bounds, shift_matrix,
    sinc_deviation, trace_moment, ShiftSource,
};
use bozdl_core::scalar::cis;
use bozdl_core::single_well::{rotate_min_to_origin, SingleWellProfile};
use bozdl_core::{Error, Signal, Spectrum};
use num_complex::Complex;

fn cosine() -> Signal {
    PeriodicSignal::cosine(1.0)
}

#[test]
fn lax_matrix_of_cosine_is_tridiagonal() {
    let a = build_lax_matrix(&cosine(), 1.0, 8).unwrap();
    for j in 0..8 {
        for k in 0..8 {
            let want = match (j as i64 - k as i64).abs() {
                0 => j as f64,
                1 => 0.5,
                _ => 0.0,
            };
            assert_eq!(a[(j, k)], Complex::new(want, 0.0));
        }
    }
    assert_eq!(a.conj_transpose().as_slice(), a.as_slice());
    assert!(matches!(build_lax_matrix(&cosine(), 1.0, 2), Err(Error::TruncationTooSmall { .. })));
}

#[test]
fn ground_state_bound() {
    let s = diagonalize(&cosine(), 0.5, 256).unwrap();
    assert!(s.lambdas[0] >= -1.0 - 1e-8);
    assert!(s.lambda0_identity_residual() < 1e-10);
    assert!(s.gaps.iter().skip(1).all(|&g| g >= 0.0));
}

#[test]
fn cosine_phases_are_trivial_at_unit_dispersion() {
    let s = diagonalize(&cosine(), 1.0, 128).unwrap();
    assert!(s.thetas.iter().all(|t| t.abs() < 1e-8));
}

#[test]
fn product_formula_matches_stored_coefficients() {
    let s = diagonalize(&cosine(), 0.5, 128).unwrap();
    for n in 1..6 {
        let closed = a_n_closed_form(&s, n).value;
        let stored = s.a_coeffs[n] * s.gaps[n] * s.gaps[n + 1] / (s.epsilon * s.epsilon);
        assert!((closed - stored).abs() <= 1e-8 * closed.abs().max(1e-3), "n = {n}: {closed} vs {stored}");
    }
    let zero = diagonalize(&PeriodicSignal::<f64>::zero(1), 0.5, 64).unwrap();
    assert!(a_n_closed_form(&zero, 3).value.abs() < 1e-10);
}

#[test]
fn product_bounds_and_sinc_band() {
    let s = diagonalize(&cosine(), 0.5, 128).unwrap();
    assert!(an_bounds(&s).holds(1e-9), "{:?}", an_bounds(&s));
    // The window is empty at ε = 0.5 and holds only n = 1 (off by 0.116) at
    // ε = 0.25; the band is reached at ε = 0.125.
    let s = diagonalize(&cosine(), 0.125, 128).unwrap();
    let profile = SingleWellProfile::classify(&cosine(), 4096).unwrap();
    let d = sinc_deviation(&s, &profile, -0.5, 0.5);
    assert!(d.count > 0 && d.max <= 0.1, "{d:?}");
}

#[test]
fn overlap_moduli_follow_gap_times_kappa() {
    let s = diagonalize(&cosine(), 0.5, 128).unwrap();
    for n in 0..40 {
        let g = if n == 0 { 1.0 } else { s.gaps[n] };
        let want = g * s.kappas[n];
        assert!((s.one_overlaps[n].norm_sqr() - want).abs() < 1e-8, "n = {n}");
    }
}

#[test]
fn two_routes_agree_on_a_generic_well() {
    let raw = PeriodicSignal::from_modes(&[Complex::new(-0.5f64, 0.0), Complex::new(0.05, -0.025)]).unwrap();
    let (u, _) = rotate_min_to_origin(&raw);
    let s = diagonalize(&u, 0.5, 128).unwrap();
    let a = shift_matrix(&s, ShiftSource::Eigenvectors).unwrap();
    let b = shift_matrix(&s, ShiftSource::SpectralFormula).unwrap();
    for i in 0..32 {
        for j in 0..32 {
            let (x, y) = (a.m[(i, j)], b.m[(i, j)]);
            assert!((x - y).norm() <= 1e-6 * x.norm().max(1.0), "({i},{j}): {x} vs {y}");
        }
    }
    assert!((trace_moment(&b, 1) - u.coeff(1)).norm() < 1e-6);
    assert!((trace_moment(&b, 2) - u.coeff(2)).norm() < 1e-6);
}

#[test]
fn inversion_reproduces_samples() {
    let s = diagonalize(&cosine(), 0.5, 256).unwrap();
    let d = shift_matrix(&s, ShiftSource::SpectralFormula).unwrap();
    assert!(invert(&d, Complex::new(0.0, 0.0)).unwrap().norm() < 1e-7);
    for j in 0..64 {
        let x = 2.0 * PI * j as f64 / 64.0;
        let got = 2.0 * invert(&d, cis(x)).unwrap().re;
        assert!((got + x.cos()).abs() < 1e-6, "x = {x}");
    }
    assert!(matches!(invert(&d, Complex::new(1.5, 0.0)), Err(Error::InvalidParameter(_))));
}

#[test]
fn trace_moments_of_zero_vanish() {
    let s = diagonalize(&PeriodicSignal::<f64>::zero(1), 0.5, 64).unwrap();
    let d = shift_matrix(&s, ShiftSource::SpectralFormula).unwrap();
    for k in 1..5 {
        assert_eq!(trace_moment(&d, k), Complex::new(0.0, 0.0));
    }
}

#[test]
fn automatic_truncation_converges() {
    let s: Spectrum = diagonalize_auto(&cosine(), 0.25).unwrap();
    assert!(s.quality.truncation_drift.unwrap() < 1e-10);
    assert!((s.parseval_norm_sq() - 0.5).abs() < 1e-8);
}

#[test]
fn single_precision_spectrum() {
    let s = diagonalize(&PeriodicSignal::cosine(1.0f32), 0.5, 64).unwrap();
    let d = shift_matrix(&s, ShiftSource::Eigenvectors).unwrap();
    assert!((trace_moment(&d, 1).re + 0.5).abs() < 1e-3);
}

#[test]
fn spectrum_json_fields() {
    let s = diagonalize(&cosine(), 0.5, 64).unwrap();
    let v = serde_json::to_value(s.to_json()).unwrap();
    for key in ["epsilon", "N", "lambdas", "gaps", "thetas", "kappa", "mu", "quality"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["N"], 64);
    assert!(v["quality"].get("tail_estimate").is_some());
}
