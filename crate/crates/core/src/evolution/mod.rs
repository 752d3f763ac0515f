//! Linear flow of the Birkhoff angles, reconstruction of `u^ε(t)`, admissible
//! approximate initial data and the zero-dispersion experiment.

mod experiment;
mod pde;

pub use experiment::{zdl_experiment, ZdlOptions, ZdlRecord};
pub use pde::{bo_direct_solve, PdeOptions, PdeSolution};

use std::sync::OnceLock;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::PeriodicSignal;
use crate::lax::{diagonalize_auto, invert, shift_matrix_evolved, trace_moment, LaxSpectrum, ShiftMatrixData, ShiftSource};
use crate::roots::bisect;
use crate::scalar::{cis, idx, lit, wrap_angle, Real};
use crate::single_well::SingleWellProfile;

/// Max-norm tolerance of the cosine round trip that validates the angle convention.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-5;

/// BO frequencies with the residual of `ω_{n+1} − ω_n = 2λ_n + ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequencies<T> {
    pub omegas: Vec<T>,
    pub gap_identity_residual: T,
}

/// `ω_n = εn² − 2 Σ_{k≥1} min(k, n) γ_k` over the whole stored spectrum.
pub fn frequencies<T: Real>(spec: &LaxSpectrum<T>) -> Frequencies<T> {
    let d = spec.len();
    let eps = spec.epsilon;
    // Σ_k min(k,n)γ_k = Σ_{j=1}^{n} Σ_{k≥j} γ_k.
    let tails = tail_sums(&spec.gaps);
    let mut omegas = Vec::with_capacity(d);
    let mut acc = T::zero();
    for (n, &tail) in tails.iter().enumerate().take(d) {
        if n > 0 {
            acc = acc + tail;
        }
        let nf = idx::<T>(n);
        omegas.push(eps * nf * nf - (acc + acc));
    }
    let gap_identity_residual = (0..d.saturating_sub(1))
        .map(|n| (omegas[n + 1] - omegas[n] - (spec.lambdas[n] + spec.lambdas[n] + eps)).abs())
        .fold(T::zero(), T::max);
    Frequencies { omegas, gap_identity_residual }
}

/// `tails[j] = Σ_{k≥j} γ_k`.
fn tail_sums<T: Real>(gaps: &[T]) -> Vec<T> {
    let mut tails = vec![T::zero(); gaps.len() + 1];
    for j in (0..gaps.len()).rev() {
        tails[j] = tails[j + 1] + gaps[j];
    }
    tails
}

/// Frequencies of the third-order flow with its gap-identity residual.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyFrequencies<T> {
    pub omegas: Vec<T>,
    /// Largest `|ω_{n+1} − ω_n − (3λ_n² + 3ελ_n + ε² + ‖u‖²/2)|`.
    pub gap_identity_residual: T,
    /// `‖u‖² = 2ε Σ pγ_p`.
    pub parseval_norm_sq: T,
}

/// `ω⁽³⁾_n = ε²n³ + εnΣpγ_p − 3εΣmin(p,n)²γ_p + 3Σ_{p,q} min(p,q,n)γ_pγ_q`.
pub fn hierarchy_frequencies<T: Real>(spec: &LaxSpectrum<T>) -> HierarchyFrequencies<T> {
    let d = spec.len();
    let eps = spec.epsilon;
    let g = &spec.gaps;
    let tails = tail_sums(g);
    let moment: T = g.iter().enumerate().map(|(p, &gp)| idx::<T>(p) * gp).sum();
    let three = lit::<T>(3.0);
    let mut omegas = Vec::with_capacity(d);
    // Running pieces: Σ_{p≤n} p²γ_p and Σ_{j≤n} tails[j]².
    let mut low_sq = T::zero();
    let mut quad = T::zero();
    for n in 0..d {
        let nf = idx::<T>(n);
        if n > 0 {
            low_sq = low_sq + nf * nf * g[n];
            quad = quad + tails[n] * tails[n];
        }
        let min_sq = low_sq + nf * nf * tails[(n + 1).min(d)];
        omegas.push(eps * eps * nf * nf * nf + eps * nf * moment - three * eps * min_sq + three * quad);
    }
    let norm_sq = (eps + eps) * moment;
    let gap_identity_residual = (0..d.saturating_sub(1))
        .map(|n| {
            let l = spec.lambdas[n];
            let rhs = three * l * l + three * eps * l + eps * eps + norm_sq * lit(0.5);
            (omegas[n + 1] - omegas[n] - rhs).abs()
        })
        .fold(T::zero(), T::max);
    HierarchyFrequencies { omegas, gap_identity_residual, parseval_norm_sq: norm_sq }
}

/// Which flow advanced the angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    BenjaminOno,
    ThirdOrder,
}

/// Birkhoff angles advanced to time `t`; moduli and eigenvalues are shared
/// with the base spectrum untouched.
#[derive(Debug, Clone)]
pub struct FlowState<'s, T> {
    pub base: &'s LaxSpectrum<T>,
    pub t: T,
    pub flow: Flow,
    /// Frequencies of the active flow.
    pub omegas: Vec<T>,
    /// `θ_n + ω_n t`, unwrapped.
    pub evolved_thetas: Vec<T>,
    /// `ω⁽³⁾_n` when the third-order flow is active.
    pub hierarchy_omegas: Option<Vec<T>>,
}

/// Advances the angles along the BO flow.
pub fn evolve<T: Real>(spec: &LaxSpectrum<T>, t: T) -> FlowState<'_, T> {
    let omegas = frequencies(spec).omegas;
    build_state(spec, t, Flow::BenjaminOno, omegas, None)
}

/// Advances the angles along the third-order flow of the hierarchy.
pub fn evolve_hierarchy<T: Real>(spec: &LaxSpectrum<T>, t: T) -> FlowState<'_, T> {
    let omegas = hierarchy_frequencies(spec).omegas;
    build_state(spec, t, Flow::ThirdOrder, omegas.clone(), Some(omegas))
}

fn build_state<T: Real>(
    spec: &LaxSpectrum<T>,
    t: T,
    flow: Flow,
    omegas: Vec<T>,
    hierarchy_omegas: Option<Vec<T>>,
) -> FlowState<'_, T> {
    let evolved_thetas = spec.thetas.iter().zip(&omegas).map(|(&th, &w)| th + w * t).collect();
    FlowState { base: spec, t, flow, omegas, evolved_thetas, hierarchy_omegas }
}

impl<'s, T: Real> FlowState<'s, T> {
    /// The state after a further time `dt`.
    pub fn advance(&self, dt: T) -> FlowState<'s, T> {
        let evolved_thetas = self.evolved_thetas.iter().zip(&self.omegas).map(|(&th, &w)| th + w * dt).collect();
        FlowState {
            base: self.base,
            t: self.t + dt,
            flow: self.flow,
            omegas: self.omegas.clone(),
            evolved_thetas,
            hierarchy_omegas: self.hierarchy_omegas.clone(),
        }
    }

    /// Angles wrapped into `(−π, π]`.
    pub fn wrapped_thetas(&self) -> Vec<T> {
        self.evolved_thetas.iter().map(|&th| wrap_angle(th)).collect()
    }

    /// `θ_n(t) − θ_n(0)`.
    pub fn phase_shifts(&self) -> Vec<T> {
        self.evolved_thetas.iter().zip(&self.base.thetas).map(|(&a, &b)| a - b).collect()
    }

    /// Shift matrix at time `t`.
    pub fn shift_matrix(&self, mode: ShiftSource) -> Result<ShiftMatrixData<T>> {
        shift_matrix_evolved(self.base, mode, Some(&self.phase_shifts()))
    }

    /// `ε Tr(M(t)^k)`, the `k`-th Fourier coefficient of `u^ε(t)`.
    pub fn fourier(&self, k: usize) -> Result<Complex<T>> {
        Ok(trace_moment(&self.shift_matrix(ShiftSource::SpectralFormula)?, k))
    }
}

static CONVENTION_GATE: OnceLock<f64> = OnceLock::new();

/// Runs (once per process) the cosine round trip at `ε ∈ {1, 0.5}` and
/// returns its max-norm error.
pub fn validate_phase_convention() -> f64 {
    *CONVENTION_GATE.get_or_init(|| {
        let u = PeriodicSignal::<f64>::cosine(1.0);
        let grid: Vec<f64> = (0..64).map(|j| 2.0 * std::f64::consts::PI * j as f64 / 64.0).collect();
        let want: Vec<f64> = grid.iter().map(|&x| u.eval(x)).collect();
        [1.0, 0.5]
            .iter()
            .map(|&eps| {
                diagonalize_auto(&u, eps)
                    .and_then(|spec| reconstruct_unchecked(&evolve(&spec, 0.0), &grid))
                    .map(|got| got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    })
}

/// `u^ε(t)` on `grid` through the inversion formula with evolved angles.
pub fn reconstruct<T: Real>(state: &FlowState<'_, T>, grid: &[T]) -> Result<Vec<T>> {
    let gate = validate_phase_convention();
    if !(gate <= ROUND_TRIP_TOLERANCE) {
        return Err(Error::ConventionUnvalidated { error: gate });
    }
    reconstruct_unchecked(state, grid)
}

fn reconstruct_unchecked<T: Real>(state: &FlowState<'_, T>, grid: &[T]) -> Result<Vec<T>> {
    let data = state.shift_matrix(ShiftSource::SpectralFormula)?;
    grid.par_iter()
        .map(|&x| invert(&data, cis(x)).map(|p| p.re * lit(2.0)))
        .collect()
}

/// Admissible approximate initial data built from the distribution function.
///
/// Small eigenvalues solve `∫_{−λ_n}^{max u} F = nε`, large ones are `nε`;
/// angles follow `θ_{n+1} = θ_n + π − (x₊(−λ_n) + x₋(−λ_n))/2`.
pub fn synth_admissible<T: Real>(profile: &SingleWellProfile<T>, epsilon: T) -> Result<LaxSpectrum<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let (u_min, u_max) = (profile.u_min(), profile.u_max());
    let sup = u_min.abs().max(u_max.abs());
    let cut = ((sup + lit(2.0)) / epsilon).ceil().to_usize().unwrap_or(0) + 64;
    let total = profile.integral_of_f(u_min, u_max)?;
    let mut lambdas = Vec::with_capacity(cut + 1);
    for n in 0..=cut {
        let target = epsilon * idx(n);
        let lambda = if n == 0 {
            -u_max
        } else if target < total {
            let g = |eta: T| profile.integral_of_f(eta, u_max).unwrap_or(T::nan()) - target;
            -bisect(g, u_min, u_max, lit(1e-13)).ok_or_else(|| {
                Error::InvalidParameter(format!("quantization bisection failed at n = {n}"))
            })?
        } else {
            target
        };
        lambdas.push(lambda);
    }
    let mut thetas = vec![T::zero(); lambdas.len()];
    for n in 0..lambdas.len() - 1 {
        let eta = -lambdas[n];
        thetas[n + 1] = thetas[n] + T::PI() - (profile.x_plus(eta) + profile.x_minus(eta)) * lit(0.5);
    }
    let thetas = thetas.into_iter().map(wrap_angle).collect();
    LaxSpectrum::from_eigenvalues(epsilon, lambdas, thetas)
}

/// Max-norm error of reconstructing `u` from its own spectrum at `t = 0`.
pub fn round_trip_error<T: Real>(u: &PeriodicSignal<T>, epsilon: T, points: usize) -> Result<T> {
    let spec = diagonalize_auto(u, epsilon)?;
    let h = (T::PI() + T::PI()) / idx(points);
    let grid: Vec<T> = (0..points).map(|j| h * idx(j)).collect();
    let got = reconstruct(&evolve(&spec, T::zero()), &grid)?;
    Ok(got.iter().zip(&grid).map(|(&a, &x)| (a - u.eval(x)).abs()).fold(T::zero(), T::max))
}

/// Mean-square norm of samples on a uniform grid.
pub fn grid_norm<T: Real>(values: &[T]) -> T {
    (values.iter().map(|&v| v * v).sum::<T>() / idx(values.len())).sqrt()
}
