use std::f64::consts::PI;

use bozdl_core::evolution::{
    bo_direct_solve, evolve, evolve_hierarchy, frequencies, grid_norm, hierarchy_frequencies, reconstruct,
    round_trip_error, synth_admissible, zdl_experiment, PdeOptions, ZdlOptions,
};
use bozdl_core::fourier::PeriodicSignal;
use bozdl_core::lax::{diagonalize, diagonalize_auto, shift_matrix, trace_moment, ShiftSource, SpectrumSource};
use bozdl_core::scalar::wrap_angle;
use bozdl_core::single_well::rotate_min_to_origin;
use bozdl_core::{Error, Profile, Signal};
use num_complex::Complex;

fn cosine() -> Signal {
    PeriodicSignal::cosine(1.0)
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

fn asymmetric() -> Signal {
    let raw = PeriodicSignal::from_modes(&[Complex::new(-0.5, 0.0), Complex::new(0.05, -0.025)]).unwrap();
    rotate_min_to_origin(&raw).0
}

#[test]
fn frequencies_two_routes() {
    let s = diagonalize_auto(&cosine(), 0.5).unwrap();
    let f = frequencies(&s);
    assert!((f.omegas[1] - f.omegas[0] - (2.0 * s.lambdas[0] + 0.5)).abs() < 1e-9);
    let mut cumulative = f.omegas[0];
    for n in 1..s.len() {
        cumulative += 2.0 * s.lambdas[n - 1] + 0.5;
        assert!((cumulative - f.omegas[n]).abs() < 1e-8, "n = {n}");
    }
}

#[test]
fn hierarchy_identity_and_scaling() {
    let s = diagonalize_auto(&cosine(), 0.5).unwrap();
    let h = hierarchy_frequencies(&s);
    assert!(h.gap_identity_residual <= 1e-7);
    assert!((h.parseval_norm_sq - 0.5).abs() < 1e-9);

    // ω⁽³⁾(u; ε) = ε² ω⁽³⁾(u/ε; 1).
    let unit = diagonalize_auto(&cosine().scaled(2.0), 1.0).unwrap();
    let h1 = hierarchy_frequencies(&unit);
    for n in 0..30 {
        assert!((h.omegas[n] - 0.25 * h1.omegas[n]).abs() < 1e-9 * h.omegas[n].abs().max(1.0), "n = {n}");
    }
    let g = hierarchy_frequencies(&diagonalize_auto(&asymmetric(), 0.25).unwrap());
    assert!(g.gap_identity_residual <= 1e-7);
}

#[test]
fn flow_is_isospectral_and_additive() {
    let s = diagonalize_auto(&asymmetric(), 0.5).unwrap();
    let zero = evolve(&s, 0.0);
    assert_eq!(zero.evolved_thetas, s.thetas);
    let a = evolve(&s, 0.35).advance(0.4);
    let b = evolve(&s, 0.75);
    for (x, y) in a.evolved_thetas.iter().zip(&b.evolved_thetas) {
        assert!(wrap_angle(x - y).abs() < 1e-10);
    }
    assert!(std::ptr::eq(a.base, &s));
    let h = evolve_hierarchy(&s, 0.3);
    assert!(h.hierarchy_omegas.is_some());
}

#[test]
fn reconstruction_round_trip_and_norm() {
    assert!(round_trip_error(&cosine(), 0.5, 64).unwrap() <= 1e-5);
    assert!(round_trip_error(&asymmetric(), 0.5, 64).unwrap() <= 1e-5);
    let s = diagonalize_auto(&cosine(), 0.2).unwrap();
    let xs = grid(256);
    for t in [0.3, 1.0] {
        let u = reconstruct(&evolve(&s, t), &xs).unwrap();
        assert!((grid_norm(&u) - cosine().norm()).abs() <= 1e-6, "t = {t}");
    }
}

#[test]
fn reconstruction_matches_direct_solver() {
    for u0 in [cosine(), asymmetric()] {
        let s = diagonalize_auto(&u0, 0.5).unwrap();
        let pde = bo_direct_solve(&u0, 0.5, 0.2, PdeOptions::default()).unwrap();
        let rec = reconstruct(&evolve(&s, 0.2), &pde.x).unwrap();
        let err = rec.iter().zip(&pde.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 2e-3, "{err}");
    }
}

#[test]
fn direct_solver_conserves_mass_and_norm() {
    let u0 = asymmetric();
    let s = bo_direct_solve(&u0, 0.25, 1.0, PdeOptions::default()).unwrap();
    let mean: f64 = s.u.iter().sum::<f64>() / s.u.len() as f64;
    assert!(mean.abs() <= 1e-10);
    assert!((grid_norm(&s.u) - u0.norm()).abs() <= 1e-6);
    let zero = bo_direct_solve(&PeriodicSignal::zero(1), 0.5, 0.5, PdeOptions::default()).unwrap();
    assert!(zero.u.iter().all(|&v| v == 0.0));
}

#[test]
fn direct_solver_guards() {
    let u0 = cosine();
    let coarse = PdeOptions { dt: 0.05, ..PdeOptions::default() };
    assert!(matches!(bo_direct_solve(&u0, 0.25, 1.0, coarse), Err(Error::BlowupDetected { .. })));
    assert!(matches!(bo_direct_solve(&u0, 0.1, 0.5, PdeOptions::default()), Err(Error::InvalidParameter(_))));
    assert!(matches!(bo_direct_solve(&u0, 0.5, 2.0, PdeOptions::default()), Err(Error::InvalidParameter(_))));
}

#[test]
fn synthetic_spectrum_construction() {
    let p = Profile::classify(&asymmetric(), 4096).unwrap();
    let mut drift = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let s = synth_admissible(&p, eps).unwrap();
        assert_eq!(s.source, SpectrumSource::Synthetic);
        for n in 1..s.len() {
            let eta = -s.lambdas[n];
            if eta > p.u_min() {
                let action = p.integral_of_f(eta, p.u_max()).unwrap();
                assert!((action - n as f64 * eps).abs() <= 1e-10, "n = {n}");
            } else if -s.lambdas[n - 1] <= p.u_min() {
                assert!(s.gaps[n].abs() < 1e-12, "large regime gap at n = {n}");
            }
        }
        drift.push((s.parseval_norm_sq() - asymmetric().norm_sq()).abs());
    }
    assert!(drift.windows(2).all(|w| w[1] < w[0]), "{drift:?}");
}

#[test]
fn true_cosine_spectrum_is_admissible() {
    let p = Profile::classify(&cosine(), 4096).unwrap();
    for eps in [0.2, 0.1, 0.05] {
        let s = diagonalize_auto(&cosine(), eps).unwrap();
        for n in 0..s.len() - 1 {
            let (a, b) = (s.lambdas[n] + eps, s.lambdas[n + 1] + eps);
            if a < -0.8 || b > 0.8 {
                continue;
            }
            let step = p.integral_of_f(-s.lambdas[n + 1], -s.lambdas[n]).unwrap();
            assert!((step - eps).abs() <= 0.6 * eps.powf(1.5), "ε = {eps}, n = {n}: {step}");
        }
    }
}

#[test]
fn experiment_at_time_zero_is_the_trace_identity() {
    let p = Profile::classify(&cosine(), 4096).unwrap();
    let rows = zdl_experiment(
        &p,
        &ZdlOptions { k_list: vec![1], t_list: vec![0.0], epsilon_list: vec![0.5, 0.25], truncation: Some(128), force_synthetic: false },
    )
    .unwrap();
    for r in &rows {
        let s = diagonalize(&cosine(), r.epsilon, 128).unwrap();
        let tr = trace_moment(&shift_matrix(&s, ShiftSource::SpectralFormula).unwrap(), 1);
        assert!((r.abs_error - (tr + 0.5).norm()).abs() < 1e-12);
        assert!(r.abs_error < 1e-6);
    }
}

#[test]
fn experiment_before_breaking_uses_single_valued_solution() {
    let p = Profile::classify(&cosine(), 4096).unwrap();
    let rows = zdl_experiment(
        &p,
        &ZdlOptions { k_list: vec![1, 2], t_list: vec![0.3], epsilon_list: vec![0.2, 0.1], truncation: None, force_synthetic: false },
    )
    .unwrap();
    for r in &rows {
        let direct = bozdl_core::burgers::fourier_direct(&p, 0.3, r.k as i64, 4096).unwrap();
        assert!((r.fourier_burgers - direct).norm() < 1e-5);
    }
    let errs: Vec<f64> = rows.iter().filter(|r| r.k == 1).map(|r| r.abs_error).collect();
    assert!(errs[1] < errs[0]);
}

#[test]
fn experiment_converges_after_breaking() {
    let p = Profile::classify(&cosine(), 4096).unwrap();
    for force_synthetic in [false, true] {
        let rows = zdl_experiment(
            &p,
            &ZdlOptions { k_list: vec![1], t_list: vec![1.0], epsilon_list: vec![0.2, 0.1, 0.05], truncation: None, force_synthetic },
        )
        .unwrap();
        let errs: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "synthetic = {force_synthetic}: {errs:?}");
    }
}

#[test]
fn experiment_rejects_bad_lists() {
    let p = Profile::classify(&cosine(), 4096).unwrap();
    let bad = ZdlOptions { k_list: vec![1], t_list: vec![0.0], epsilon_list: vec![0.1, 0.2], truncation: None, force_synthetic: false };
    assert!(matches!(zdl_experiment(&p, &bad), Err(Error::InvalidParameter(_))));
}
