use std::f64::consts::PI;

use bozdl_core::fourier::PeriodicSignal;
use bozdl_core::lax::diagonalize;
use bozdl_core::quantization::{
    laplace_i2, laplace_leading_i2, match_roots, oscillatory_i1, predict, residual, solve_roots, solve_roots_upto,
    stationary_phase_i1, Regime,
};
use bozdl_core::Error;
use num_complex::Complex;

fn trapezoid(f: impl Fn(f64) -> Complex<f64>, a: f64, b: f64, n: usize) -> Complex<f64> {
    let h = (b - a) / n as f64;
    let inner: Complex<f64> = (1..n).map(|j| f(a + h * j as f64)).sum();
    (inner + (f(a) + f(b)) * 0.5) * h
}

#[test]
fn oscillatory_integral_matches_brute_force() {
    let (beta, eps, nu) = (1.0f64, 0.1, 0.3);
    let want = trapezoid(|p| Complex::from_polar(1.0, (beta * p.sin() + nu * p) / eps), 0.0, PI, 1_000_000);
    let got = oscillatory_i1(beta, eps, nu).unwrap();
    assert!((got - want).norm() < 1e-8, "{got} vs {want}");
}

#[test]
fn laplace_integral_matches_brute_force() {
    let (beta, eps) = (1.0f64, 0.1);
    // Composite Simpson on [0, 3]; the integrand is below e^{−90} past x = 3.
    let n = 1_000_000;
    let h = 3.0 / n as f64;
    let f = |x: f64| (-beta * x.sinh() / eps).exp();
    let mut s = f(0.0) + f(3.0);
    for j in 1..n {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(h * j as f64);
    }
    let want = s * h / 3.0;
    let got = laplace_i2(beta, eps, 0.0).unwrap();
    assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn laplace_saddle_within_first_order_band() {
    let (beta, eps, nu) = (1.0f64, 0.2, 1.5);
    let ratio = laplace_i2(beta, eps, nu).unwrap() / laplace_leading_i2(beta, eps, nu);
    assert!((ratio - 1.0).abs() < eps, "{ratio}");
}

#[test]
fn matrix_eigenvalues_are_roots() {
    let eps = 0.5f64;
    let s = diagonalize(&PeriodicSignal::cosine(1.0), eps, 256).unwrap();
    // Past ν ≈ 3 the scale of I grows like e^{S₂/ε}, so an absolute bound
    // stops being meaningful.
    for n in (0..s.len()).take_while(|&n| s.lambdas[n] + eps <= 3.0) {
        let r = residual(1.0, eps, s.lambdas[n] + eps).unwrap();
        assert!(r.residual.abs() <= 1e-6, "n = {n}: {}", r.residual);
    }
}

#[test]
fn residual_tracks_stationary_phase_between_roots() {
    for eps in [0.25f64, 0.125] {
        let roots = solve_roots(1.0, eps, 0.1).unwrap();
        let small: Vec<_> = roots.iter().filter(|r| r.regime == Regime::Small).collect();
        assert!(small.len() >= 2);
        for w in small.windows(2) {
            let mid = 0.5 * (w[0].nu0 + w[1].nu0);
            let lead = stationary_phase_i1(1.0, eps, mid);
            let r = residual(1.0, eps, mid).unwrap();
            assert!((r.residual - lead.re).abs() <= 0.1 * lead.norm(), "ν = {mid}");
            assert!(r.residual.abs() >= 0.5 * lead.norm());
        }
        for r in &small {
            assert!(residual(1.0, eps, r.nu0).unwrap().residual.abs() <= eps, "ν₀ = {}", r.nu0);
        }
    }
}

#[test]
fn predictions() {
    let eps = 1.0 / PI / 0.75;
    assert!(predict(1.0f64, eps, 0, Regime::Small, 0.0).unwrap().nu0.abs() < 1e-12);
    assert!((predict(1.0f64, 0.1, 19, Regime::Large, 0.1).unwrap().nu0 - 2.0).abs() < 1e-14);
    // ∫_{−ν}^{1} F = 3ε/4 is tiny, which puts ν₀ next to −β.
    let p = predict(1.0f64, 0.01, 0, Regime::Small, 0.0).unwrap();
    assert!(p.nu0 < -0.9, "{}", p.nu0);
}

#[test]
fn roots_pair_with_matrix_eigenvalues() {
    let eps = 0.25f64;
    let roots = solve_roots_upto(1.0, eps, 0.1, 3.0).unwrap();
    let s = diagonalize(&PeriodicSignal::cosine(1.0), eps, 256).unwrap();
    let m = match_roots(&roots, &s.lambdas);
    assert!(m.one_to_one);
    assert!(m.max_error() <= 1e-6, "{}", m.max_error());
}

#[test]
fn small_regime_residual_scales_like_three_halves() {
    let delta = 0.2;
    let worst: Vec<f64> = [0.2f64, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            solve_roots(1.0, eps, delta)
                .unwrap()
                .iter()
                .filter(|r| r.regime == Regime::Small)
                .map(|r| r.action_residual.abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for w in worst.windows(2) {
        let exponent = (w[0] / w[1]).log2();
        assert!((1.1..=1.9).contains(&exponent), "exponent {exponent} from {worst:?}");
    }
}

#[test]
fn large_regime_residual_is_bounded_by_three_halves_power() {
    for eps in [0.2f64, 0.1, 0.05] {
        for r in solve_roots(1.0, eps, 0.1).unwrap().iter().filter(|r| r.regime == Regime::Large) {
            assert!(r.action_residual.abs() <= 0.5 * eps.powf(1.5), "ε = {eps}, ν = {}", r.nu);
        }
    }
}

#[test]
fn parameter_validation() {
    assert!(matches!(solve_roots(1.0f64, 0.1, 0.3), Err(Error::InvalidParameter(_))));
    assert!(matches!(residual(1.0f64, 0.0, 0.2), Err(Error::InvalidParameter(_))));
}
