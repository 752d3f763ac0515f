//! Explicit eigenvalue equation for `u₀ = −β cos x` and its semiclassical
//! quantization rules.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, AdaptiveOptions, GaussLegendre};
use crate::roots::bisect;
use crate::scalar::{cis, idx, lit, to64, Real};
use crate::single_well::cosine_antiderivative;

/// Smallest dispersion accepted by the oscillatory kernel.
pub const EPSILON_FLOOR: f64 = 1e-4;
/// Root windows extend this fraction of the predicted spacing.
pub const WINDOW_FRACTION: f64 = 0.45;
/// Bisection tolerance on `ν`.
pub const ROOT_TOLERANCE: f64 = 1e-11;

/// Which semiclassical rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `ν ∈ [−β+δ, β−δ]`: `∫_{−ν}^β F = ε(N + 3/4)`.
    Small,
    /// `ν ≥ β+δ`: `ν = (N+1)ε`.
    Large,
}

/// Predicted position `ν_N⁰` of the `N`-th root in a regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationPrediction<T> {
    pub regime: Regime,
    pub n: usize,
    pub nu0: T,
    pub epsilon: T,
    pub beta: T,
    pub delta: T,
}

/// Terms of `I(ε,ν) = Re I₁ + sin(πν/ε)·I₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEquationResidual<T> {
    pub nu: T,
    pub i1_real: T,
    pub i2: T,
    pub residual: T,
}

/// A solved root of the eigenvalue equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRecord<T> {
    pub n: usize,
    pub regime: Regime,
    pub nu0: T,
    pub nu: T,
    /// Lax eigenvalue `λ = ν − ε`.
    pub lambda: T,
    /// `∫_{−ν}^β F − ε(N+3/4)` (small) or `ν − (N+1)ε` (large).
    pub action_residual: T,
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if epsilon < lit(EPSILON_FLOOR) {
        return Err(Error::QuadratureBudgetExceeded { epsilon: to64(epsilon) });
    }
    Ok(())
}

/// `I₁ = ∫_0^π exp(i(β sin φ + ν φ)/ε) dφ` on Gauss–Legendre panels with at
/// least 24 nodes per period of the phase.
pub fn oscillatory_i1<T: Real>(beta: T, epsilon: T, nu: T) -> Result<Complex<T>> {
    check_epsilon(epsilon)?;
    let periods = (beta.abs() + nu.abs()) / (epsilon + epsilon);
    let gl = GaussLegendre::<T>::new(16);
    // Two panels of 16 nodes per period gives 32 nodes per period.
    let panels = (periods * lit(2.0)).ceil().to_usize().unwrap_or(1).max(4);
    Ok(gl.integrate_panels(|phi: T| cis((beta * phi.sin() + nu * phi) / epsilon), T::zero(), T::PI(), panels))
}

/// `I₂ = ∫_0^∞ exp((−β sinh x + ν x)/ε) dx`, truncated where the exponent has
/// dropped 45 below its maximum.
pub fn laplace_i2<T: Real>(beta: T, epsilon: T, nu: T) -> Result<T> {
    check_epsilon(epsilon)?;
    if !(beta > T::zero()) {
        return Err(Error::InvalidParameter("laplace_i2 needs beta > 0".into()));
    }
    let expo = |x: T| (nu * x - beta * x.sinh()) / epsilon;
    let peak = if nu > beta { (nu / beta).acosh() } else { T::zero() };
    let top = expo(peak);
    let drop = lit::<T>(45.0);
    let mut hi = peak + T::one();
    while expo(hi) > top - drop {
        hi = hi + hi;
    }
    let x_cut = bisect(|x| expo(x) - (top - drop), peak, hi, lit(1e-12)).unwrap_or(hi);
    let opts = AdaptiveOptions { abs_tol: T::zero(), rel_tol: lit(1e-12), ..AdaptiveOptions::default() };
    let f = |x: T| (expo(x) - top).exp();
    let mut total = adaptive(f, peak, x_cut, opts)?;
    if peak > T::zero() {
        total = total + adaptive(f, T::zero(), peak, opts)?;
    }
    Ok(total * top.exp())
}

/// `I(ε, ν)`; zeros are the shifted Lax eigenvalues `ν = λ + ε`.
pub fn residual<T: Real>(beta: T, epsilon: T, nu: T) -> Result<EigenEquationResidual<T>> {
    let i1_real = oscillatory_i1(beta, epsilon, nu)?.re;
    let i2 = laplace_i2(beta, epsilon, nu)?;
    let residual = i1_real + (T::PI() * nu / epsilon).sin() * i2;
    Ok(EigenEquationResidual { nu, i1_real, i2, residual })
}

/// `S₁(x₁(ν), ν) = √(β²−ν²) + ν·arccos(−ν/β)` for `|ν| < β`.
pub fn stationary_action<T: Real>(beta: T, nu: T) -> T {
    (beta * beta - nu * nu).max(T::zero()).sqrt() + nu * (-nu / beta).max(-T::one()).min(T::one()).acos()
}

/// Leading stationary-phase term of `I₁` for `|ν| < β`.
///
/// The amplitude is `√(2πε/|S₁''|)` with `|S₁''| = √(β²−ν²)`.
pub fn stationary_phase_i1<T: Real>(beta: T, epsilon: T, nu: T) -> Complex<T> {
    let two_pi = T::PI() + T::PI();
    let amp = (two_pi * epsilon).sqrt() / (beta * beta - nu * nu).sqrt().sqrt();
    cis(stationary_action(beta, nu) / epsilon - T::FRAC_PI_4()) * amp
}

/// Leading Laplace term of `I₂` for `ν > β`, amplitude `√(2πε/√(ν²−β²))`.
pub fn laplace_leading_i2<T: Real>(beta: T, epsilon: T, nu: T) -> T {
    let two_pi = T::PI() + T::PI();
    let root = (nu * nu - beta * beta).sqrt();
    let s2 = -root + nu * (nu / beta).acosh();
    (two_pi * epsilon).sqrt() / root.sqrt() * (s2 / epsilon).exp()
}

/// `∫_{−ν}^β F` for the cosine well, `F(η) = arccos(η/β)/π`.
pub fn cosine_action<T: Real>(beta: T, nu: T) -> T {
    cosine_antiderivative(beta, beta) - cosine_antiderivative(beta, -nu)
}

fn invert_action<T: Real>(beta: T, target: T) -> T {
    bisect(|nu| cosine_action(beta, nu) - target, -beta, beta, lit(1e-15)).unwrap_or(beta)
}

/// Predicted `ν_N⁰`.
pub fn predict<T: Real>(beta: T, epsilon: T, n: usize, regime: Regime, delta: T) -> Result<QuantizationPrediction<T>> {
    if !(beta > T::zero() && epsilon > T::zero() && delta >= T::zero()) {
        return Err(Error::InvalidParameter("predict needs beta > 0, epsilon > 0, delta >= 0".into()));
    }
    let nf = idx::<T>(n);
    let nu0 = match regime {
        Regime::Small => {
            let target = epsilon * (nf + lit(0.75));
            let cap = cosine_action(beta, beta - delta);
            if target > cap {
                return Err(Error::RegimeMismatch(format!(
                    "small regime needs eps(N+3/4) = {target} <= {cap}"
                )));
            }
            invert_action(beta, target)
        }
        Regime::Large => {
            let nu0 = (nf + T::one()) * epsilon;
            if nu0 < beta + delta {
                return Err(Error::RegimeMismatch(format!("large regime needs (N+1)eps = {nu0} >= beta + delta")));
            }
            nu0
        }
    };
    Ok(QuantizationPrediction { regime, n, nu0, epsilon, beta, delta })
}

/// Upper end `K(δ)` of the large regime: `‖u‖²/K < 2δ` with `‖u‖² = β²/2`.
pub fn large_regime_cutoff<T: Real>(beta: T, delta: T) -> T {
    (beta * beta / (lit::<T>(4.0) * delta) * lit(1.000_001)).max(beta + delta + delta)
}

/// Roots in both regimes with the default cutoff [`large_regime_cutoff`].
pub fn solve_roots<T: Real>(beta: T, epsilon: T, delta: T) -> Result<Vec<RootRecord<T>>> {
    solve_roots_upto(beta, epsilon, delta, large_regime_cutoff(beta, delta))
}

/// Roots with `ν ∈ [−β+δ, β−δ] ∪ [β+δ, upper]`, ascending.
pub fn solve_roots_upto<T: Real>(beta: T, epsilon: T, delta: T, upper: T) -> Result<Vec<RootRecord<T>>> {
    check_epsilon(epsilon)?;
    if !(delta > T::zero() && delta < beta * lit(0.25)) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, beta/4), got {delta}")));
    }
    let frac = lit::<T>(WINDOW_FRACTION);
    let total_action = cosine_action(beta, beta);
    let small_nu0 = |n: usize| -> Option<T> {
        let target = epsilon * (idx::<T>(n) + lit(0.75));
        (target < total_action).then(|| invert_action(beta, target))
    };
    let mut jobs: Vec<(usize, Regime, T, T, T)> = Vec::new();
    let mut n = 0usize;
    while let Some(nu0) = small_nu0(n) {
        if nu0 > beta - delta {
            break;
        }
        if nu0 >= -beta + delta {
            let spacing = |nu: T| epsilon * T::PI() / (-nu / beta).max(-T::one()).min(T::one()).acos().max(lit(1e-3));
            let left = if n == 0 { spacing(nu0) } else { nu0 - small_nu0(n - 1).unwrap_or(nu0) };
            let right = small_nu0(n + 1).map_or(spacing(nu0), |r| r - nu0);
            jobs.push((n, Regime::Small, nu0, nu0 - frac * left, nu0 + frac * right));
        }
        n += 1;
    }
    let first_large = ((beta + delta) / epsilon - T::one()).ceil().to_usize().unwrap_or(0);
    let mut n = first_large;
    loop {
        let nu0 = (idx::<T>(n) + T::one()) * epsilon;
        if nu0 > upper {
            break;
        }
        if nu0 >= beta + delta {
            jobs.push((n, Regime::Large, nu0, nu0 - frac * epsilon, nu0 + frac * epsilon));
        }
        n += 1;
    }
    let mut out: Vec<RootRecord<T>> = jobs
        .par_iter()
        .map(|&(n, regime, nu0, lo, hi)| {
            let f = |nu: T| residual(beta, epsilon, nu).map(|r| r.residual).unwrap_or(T::nan());
            let nu = bisect(f, lo, hi, lit(ROOT_TOLERANCE))
                .ok_or(Error::BracketFailure { index: n, lo: to64(lo), hi: to64(hi) })?;
            let action_residual = match regime {
                Regime::Small => cosine_action(beta, nu) - epsilon * (idx::<T>(n) + lit(0.75)),
                Regime::Large => nu - (idx::<T>(n) + T::one()) * epsilon,
            };
            Ok(RootRecord { n, regime, nu0, nu, lambda: nu - epsilon, action_residual })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.nu.partial_cmp(&b.nu).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Pairing of solved roots with matrix eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct RootMatch<T> {
    /// Index of the nearest matrix eigenvalue for each root.
    pub indices: Vec<usize>,
    /// `|λ_root − λ_matrix|` for each root.
    pub errors: Vec<T>,
    /// No two roots share a matrix eigenvalue.
    pub one_to_one: bool,
}

impl<T: Real> RootMatch<T> {
    pub fn max_error(&self) -> T {
        self.errors.iter().fold(T::zero(), |m, &e| m.max(e))
    }
}

/// Pairs every root `ν` with the nearest `λ_j` in terms of `λ = ν − ε`.
pub fn match_roots<T: Real>(roots: &[RootRecord<T>], lambdas: &[T]) -> RootMatch<T> {
    let mut indices = Vec::with_capacity(roots.len());
    let mut errors = Vec::with_capacity(roots.len());
    for r in roots {
        let (j, e) = lambdas
            .iter()
            .enumerate()
            .map(|(j, &l)| (j, (l - r.lambda).abs()))
            .fold((usize::MAX, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best });
        indices.push(j);
        errors.push(e);
    }
    let mut seen = indices.clone();
    seen.sort_unstable();
    seen.dedup();
    let one_to_one = seen.len() == indices.len() && !indices.contains(&usize::MAX);
    RootMatch { indices, errors, one_to_one }
}
