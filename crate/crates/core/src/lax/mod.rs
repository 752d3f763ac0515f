//! Truncated Lax operator, its spectrum and the Birkhoff data derived from it.

mod asymptotics;
mod shift;

pub use asymptotics::{
    a_n_closed_form, gap_bound_violations, an_bounds, riemann_sum_fourier, sinc_deviation,
    toeplitz_closed_form, toeplitz_truncated_sum, AnValue, AnBounds, SincDeviation,
};
pub use shift::{invert, shift_matrix, shift_matrix_evolved, trace_moment, ShiftMatrixData, ShiftSource};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::PeriodicSignal;
use crate::linalg::CMatrix;
use crate::scalar::{idx, lit, to64, Real};

/// Gaps below this are treated as closed.
pub const GAP_CLIP: f64 = 1e-12;
/// Smallest overlap accepted while chaining eigenvector phases.
pub const PHASE_OVERLAP_FLOOR: f64 = 1e-13;
/// Eigenvalue drift accepted when certifying a truncation.
pub const TRUNCATION_DRIFT: f64 = 1e-10;
/// Largest truncation tried by [`select_truncation`].
pub const MAX_TRUNCATION: usize = 4096;

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumSource {
    /// Dense diagonalization of the truncated Lax matrix.
    Matrix,
    /// Eigenvalues prescribed by a quantization rule.
    Synthetic,
}

/// Diagnostics attached to a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumQuality<T> {
    /// Bound on the neglected tail `Σ_{p≥d} γ_p/(λ_p−λ_n)` in the products.
    pub tail_estimate: T,
    /// Largest eigenvalue movement when the truncation was doubled.
    pub truncation_drift: Option<T>,
    /// Number of gaps clipped to zero.
    pub clipped_gaps: usize,
    /// Most negative raw gap before clipping.
    pub min_raw_gap: T,
}

/// Spectral and Birkhoff data of `L_u(ε) = εD − T_u` restricted to the
/// trusted lower block of a truncation.
///
/// Index `n` runs over `0..len()`. Entries that are undefined at `n = 0`
/// (`gaps`, `mus`, `succ_overlaps`) hold zero there.
#[derive(Debug, Clone)]
pub struct LaxSpectrum<T> {
    pub epsilon: T,
    /// Hardy-space truncation `N` (modes `0..N`); for synthetic spectra the
    /// number of prescribed eigenvalues.
    pub truncation: usize,
    pub lambdas: Vec<T>,
    pub gaps: Vec<T>,
    /// `⟨1|f_n⟩`.
    pub one_overlaps: Vec<Complex<T>>,
    /// `⟨f_n|e^{ix} f_{n−1}⟩`.
    pub succ_overlaps: Vec<Complex<T>>,
    pub kappas: Vec<T>,
    pub mus: Vec<T>,
    /// `a_n = μ_{n+1}κ_n/κ_{n+1}`; the last entry is zero (needs `n+1`).
    pub a_coeffs: Vec<T>,
    pub zeta_moduli: Vec<T>,
    pub thetas: Vec<T>,
    /// Phase-fixed eigenvectors as Hardy coefficients (matrix spectra only).
    pub eigenvectors: Option<Vec<Vec<Complex<T>>>>,
    pub quality: SpectrumQuality<T>,
    pub source: SpectrumSource,
    /// `‖u‖²` of the generating signal when known.
    pub signal_norm_sq: Option<T>,
}

/// Assembles `A_{jk} = ε j δ_{jk} − û(j−k)` for `j, k = 0..N`.
pub fn build_lax_matrix<T: Real>(u: &PeriodicSignal<T>, epsilon: T, n: usize) -> Result<CMatrix<T>> {
    check_setup(u, epsilon, n)?;
    Ok(CMatrix::from_fn(n, |j, k| {
        let diag = if j == k { Complex::new(epsilon * idx(j), T::zero()) } else { Complex::zero() };
        diag - u.coeff(j as i64 - k as i64)
    }))
}

fn check_setup<T: Real>(u: &PeriodicSignal<T>, epsilon: T, n: usize) -> Result<()> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if n < 8 || n <= 2 * u.order() {
        return Err(Error::TruncationTooSmall { n, order: u.order() });
    }
    Ok(())
}

/// Diagonalizes the truncated Lax matrix and extracts the Birkhoff data.
///
/// Only the lower half `d = N/2` of the spectrum is kept: the top of a
/// truncated Toeplitz compression is polluted by the cut.
pub fn diagonalize<T: Real>(u: &PeriodicSignal<T>, epsilon: T, n: usize) -> Result<LaxSpectrum<T>> {
    let a = build_lax_matrix(u, epsilon, n)?;
    let (values, vectors) = T::hermitian_eigen(n, a.as_slice()).ok_or(Error::EigenSolverFailure { dim: n })?;
    let d = n / 2;
    let mut vecs: Vec<Vec<Complex<T>>> = (0..d).map(|j| vectors[j * n..(j + 1) * n].to_vec()).collect();

    // Chain phase fixing: ⟨1|f₀⟩ > 0, then ⟨f_n|e^{ix}f_{n−1}⟩ > 0.
    let floor = lit::<T>(PHASE_OVERLAP_FLOOR);
    let head = vecs[0][0];
    if head.norm() < floor {
        return Err(Error::PhaseFixFailure { index: 0, overlap: to64(head.norm()) });
    }
    let rot = head.conj().unscale(head.norm());
    vecs[0].iter_mut().for_each(|c| *c = *c * rot);
    let mut succ = vec![Complex::zero(); d];
    for m in 1..d {
        let ov = shifted_overlap(&vecs[m], &vecs[m - 1]);
        if ov.norm() < floor {
            return Err(Error::PhaseFixFailure { index: m, overlap: to64(ov.norm()) });
        }
        let rot = ov.conj().unscale(ov.norm());
        vecs[m].iter_mut().for_each(|c| *c = *c * rot);
        succ[m] = shifted_overlap(&vecs[m], &vecs[m - 1]);
    }

    let lambdas = values[..d].to_vec();
    let one_overlaps: Vec<Complex<T>> = vecs.iter().map(|f| f[0].conj()).collect();
    let thetas: Vec<T> = one_overlaps
        .iter()
        .map(|y| if y.norm() > T::zero() { y.im.atan2(y.re) } else { T::zero() })
        .collect();
    let mut spec = LaxSpectrum::assemble(epsilon, n, lambdas, thetas, SpectrumSource::Matrix, Some(u.norm_sq()));
    spec.one_overlaps = one_overlaps;
    spec.succ_overlaps = succ;
    spec.eigenvectors = Some(vecs);
    Ok(spec)
}

/// `⟨f|e^{ix}g⟩ = Σ_j f_j·conj(g_{j−1})`.
fn shifted_overlap<T: Real>(f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
    f[1..].iter().zip(g).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b.conj())
}

/// Smallest power-of-two truncation for which the low spectrum is stable.
///
/// The first `⌈(max u − min u)/ε⌉ + 20` eigenvalues must move by less than
/// [`TRUNCATION_DRIFT`] when `N` doubles. Returns `(N, drift)`.
pub fn select_truncation<T: Real>(u: &PeriodicSignal<T>, epsilon: T) -> Result<(usize, T)> {
    let (lo, hi) = u.grid_range();
    let m = ((hi - lo) / epsilon).ceil().to_usize().unwrap_or(0) + 20;
    let mut n = 64usize.max(2 * u.order() + 2).max(2 * (m + 1)).next_power_of_two();
    let eig = |n: usize| -> Result<Vec<T>> {
        let a = build_lax_matrix(u, epsilon, n)?;
        Ok(T::hermitian_eigenvalues(n, a.as_slice()))
    };
    let mut current = eig(n)?;
    let mut drift = T::infinity();
    while 2 * n <= MAX_TRUNCATION {
        let next = eig(2 * n)?;
        drift = current[..=m]
            .iter()
            .zip(&next)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));
        if drift < lit(TRUNCATION_DRIFT) {
            return Ok((n, drift));
        }
        n *= 2;
        current = next;
    }
    Err(Error::TruncationNotConverged { max_n: n, drift: to64(drift) })
}

/// [`diagonalize`] at the truncation chosen by [`select_truncation`].
pub fn diagonalize_auto<T: Real>(u: &PeriodicSignal<T>, epsilon: T) -> Result<LaxSpectrum<T>> {
    let (n, drift) = select_truncation(u, epsilon)?;
    let mut spec = diagonalize(u, epsilon, n)?;
    spec.quality.truncation_drift = Some(drift);
    Ok(spec)
}

impl<T: Real> LaxSpectrum<T> {
    /// Number of trusted eigenvalues.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Birkhoff data from prescribed eigenvalues and angles.
    ///
    /// `⟨1|f_n⟩` is embedded as `√(γ_n κ_n)·e^{iθ_n}` (with `γ₀ := 1`).
    pub fn from_eigenvalues(epsilon: T, lambdas: Vec<T>, thetas: Vec<T>) -> Result<Self> {
        if lambdas.len() < 2 || thetas.len() != lambdas.len() {
            return Err(Error::InvalidParameter("need matching eigenvalue and angle arrays".into()));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("eigenvalues must be strictly increasing".into()));
        }
        let n = lambdas.len();
        let mut spec = Self::assemble(epsilon, n, lambdas, thetas, SpectrumSource::Synthetic, None);
        spec.one_overlaps = (0..n)
            .map(|j| {
                let g = if j == 0 { T::one() } else { spec.gaps[j] };
                crate::scalar::cis(spec.thetas[j]) * (g * spec.kappas[j]).max(T::zero()).sqrt()
            })
            .collect();
        // succ overlaps equal M_{n−1,n} = √μ_n.
        spec.succ_overlaps = (0..n)
            .map(|j| if j == 0 { Complex::zero() } else { Complex::new(spec.mus[j].sqrt(), T::zero()) })
            .collect();
        Ok(spec)
    }

    fn assemble(
        epsilon: T,
        truncation: usize,
        lambdas: Vec<T>,
        thetas: Vec<T>,
        source: SpectrumSource,
        signal_norm_sq: Option<T>,
    ) -> Self {
        let d = lambdas.len();
        let clip = lit::<T>(GAP_CLIP);
        let mut gaps = vec![T::zero(); d];
        let mut clipped = 0;
        let mut min_raw = T::infinity();
        for j in 1..d {
            let raw = lambdas[j] - lambdas[j - 1] - epsilon;
            min_raw = min_raw.min(raw);
            if raw < clip {
                clipped += 1;
            } else {
                gaps[j] = raw;
            }
        }
        let kappas = kappas(&lambdas, &gaps);
        let mus = mus(&lambdas, &gaps, epsilon);
        let mut a_coeffs = vec![T::zero(); d];
        for j in 0..d.saturating_sub(1) {
            a_coeffs[j] = mus[j + 1] * kappas[j] / kappas[j + 1];
        }
        let zeta_moduli = gaps.iter().map(|g| g.sqrt()).collect();
        let tail_estimate = match signal_norm_sq {
            Some(norm_sq) => {
                // Parseval deficit bounds Σ_{p≥d} p γ_p, hence Σ_{p≥d} γ_p.
                let captured = gaps.iter().enumerate().map(|(p, &g)| idx::<T>(p) * g).sum::<T>() * (epsilon + epsilon);
                let deficit = (norm_sq - captured).max(T::zero()) / (epsilon + epsilon) / idx(d);
                deficit / (epsilon * idx::<T>(d / 2).max(T::one()))
            }
            None => T::zero(),
        };
        let thetas = thetas
            .into_iter()
            .zip(&gaps)
            .enumerate()
            .map(|(j, (th, _))| if j == 0 { T::zero() } else { th })
            .collect();
        Self {
            epsilon,
            truncation,
            lambdas,
            gaps,
            one_overlaps: vec![Complex::zero(); d],
            succ_overlaps: vec![Complex::zero(); d],
            kappas,
            mus,
            a_coeffs,
            zeta_moduli,
            thetas,
            eigenvectors: None,
            quality: SpectrumQuality {
                tail_estimate,
                truncation_drift: None,
                clipped_gaps: clipped,
                min_raw_gap: if d > 1 { min_raw } else { T::zero() },
            },
            source,
            signal_norm_sq,
        }
    }

    /// `2ε Σ n γ_n`, the Parseval value of `‖u‖²`.
    pub fn parseval_norm_sq(&self) -> T {
        let s: T = self.gaps.iter().enumerate().map(|(n, &g)| idx::<T>(n) * g).sum();
        s * (self.epsilon + self.epsilon)
    }

    /// Residual of `λ₀ = −Σ γ_k` (infinite-dimensional identity).
    pub fn lambda0_identity_residual(&self) -> T {
        (self.lambdas[0] + self.gaps.iter().copied().sum::<T>()).abs()
    }

    /// Largest residual of `λ_n = nε + λ₀ + Σ_{k≤n} γ_k`.
    pub fn ladder_residual(&self) -> T {
        let mut acc = self.lambdas[0];
        let mut worst = T::zero();
        for n in 1..self.len() {
            acc = acc + self.epsilon + self.gaps[n];
            worst = worst.max((self.lambdas[n] - acc).abs());
        }
        worst
    }

    /// JSON form with `quality` diagnostics.
    pub fn to_json(&self) -> SpectrumJson {
        let v = |xs: &[T]| xs.iter().map(|&x| to64(x)).collect::<Vec<f64>>();
        SpectrumJson {
            epsilon: to64(self.epsilon),
            truncation: self.truncation,
            lambdas: v(&self.lambdas),
            gaps: v(&self.gaps),
            thetas: v(&self.thetas),
            kappa: v(&self.kappas),
            mu: v(&self.mus),
            quality: QualityJson {
                tail_estimate: to64(self.quality.tail_estimate),
                truncation_drift: self.quality.truncation_drift.map(to64),
            },
        }
    }
}

/// `κ_n` from the eigenvalues, products truncated at the trusted block.
fn kappas<T: Real>(lambdas: &[T], gaps: &[T]) -> Vec<T> {
    let d = lambdas.len();
    (0..d)
        .map(|n| {
            let mut prod = if n == 0 { T::one() } else { T::one() / (lambdas[n] - lambdas[0]) };
            for p in 1..d {
                if p != n && gaps[p] != T::zero() {
                    prod = prod * (T::one() - gaps[p] / (lambdas[p] - lambdas[n]));
                }
            }
            prod
        })
        .collect()
}

/// `μ_n` for `n ≥ 1` (entry 0 is unused and zero).
fn mus<T: Real>(lambdas: &[T], gaps: &[T], epsilon: T) -> Vec<T> {
    let d = lambdas.len();
    let mut out = vec![T::zero(); d];
    for m in 1..d {
        let n = m - 1;
        let mut prod = T::one() - gaps[m] / (lambdas[m] - lambdas[0]);
        for p in 1..d {
            if p != m && gaps[p] != T::zero() {
                let num = T::one() - gaps[p] / (lambdas[p] - lambdas[m]);
                let den = T::one() - gaps[p] / (lambdas[p] - lambdas[n] - epsilon);
                prod = prod * num / den;
            }
        }
        out[m] = prod;
    }
    out
}

/// On-disk spectrum form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub lambdas: Vec<f64>,
    pub gaps: Vec<f64>,
    pub thetas: Vec<f64>,
    pub kappa: Vec<f64>,
    pub mu: Vec<f64>,
    pub quality: QualityJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityJson {
    pub tail_estimate: f64,
    pub truncation_drift: Option<f64>,
}

/// Checks that no `μ_n` is negative beyond roundoff.
pub fn check_mus<T: Real>(spec: &LaxSpectrum<T>) -> Result<()> {
    for (j, &m) in spec.mus.iter().enumerate().skip(1) {
        if m < -lit::<T>(GAP_CLIP) {
            return Err(Error::NegativeMu { index: j, value: to64(m) });
        }
    }
    Ok(())
}
