//! Real zero-mean periodic signals held as truncated Fourier series.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, idx, lit, to64, Real};

/// Absolute tolerance for accepting a sampled mean as zero.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// Default number of grid points used by grid-based queries.
pub const DEFAULT_GRID: usize = 8192;

/// Real zero-mean function on the torus, `u(x) = Σ_{|k|≤K} û(k) e^{ikx}`.
///
/// Only `k = 0..=K` is stored; negative modes follow from conjugacy.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal<T> {
    coeffs: Vec<Complex<T>>,
    grid_size: usize,
}

impl<T: Real> PeriodicSignal<T> {
    /// Builds a signal from `û(0..=K)`. A mean coefficient below the
    /// tolerance is forced to zero.
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter("signal needs order K >= 1".into()));
        }
        let mean = coeffs[0].norm();
        if mean > lit(MEAN_TOLERANCE) {
            return Err(Error::NonZeroMean { mean: to64(mean) });
        }
        coeffs[0] = Complex::zero();
        Ok(Self { coeffs, grid_size: DEFAULT_GRID })
    }

    /// The zero signal of order `k`.
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex::zero(); order.max(1) + 1], grid_size: DEFAULT_GRID }
    }

    /// `−β·cos x`.
    pub fn cosine(beta: T) -> Self {
        Self {
            coeffs: vec![Complex::zero(), Complex::new(-beta * lit(0.5), T::zero())],
            grid_size: DEFAULT_GRID,
        }
    }

    /// Signal with `û(k)` given for `k = 1..=K`.
    pub fn from_modes(modes: &[Complex<T>]) -> Result<Self> {
        let mut c = vec![Complex::zero()];
        c.extend_from_slice(modes);
        Self::new(c)
    }

    /// Discrete Fourier analysis of samples on the uniform grid `x_j = 2πj/n`.
    pub fn from_samples(values: &[T], order: usize) -> Result<Self> {
        let n = values.len();
        let required = 2 * order + 2;
        if n < required || order == 0 {
            return Err(Error::GridTooCoarse { samples: n, order, required });
        }
        let nf = idx::<T>(n);
        let two_pi = T::PI() + T::PI();
        let coeffs: Vec<Complex<T>> = (0..=order)
            .map(|k| {
                let mut acc = Complex::<T>::zero();
                for (j, &v) in values.iter().enumerate() {
                    // Reduce k·j mod n before scaling to keep the phase exact.
                    let phase = two_pi * idx::<T>((k * j) % n) / nf;
                    acc = acc + cis(-phase) * v;
                }
                acc / nf
            })
            .collect();
        let out = Self::new(coeffs)?;
        Ok(out.with_grid_size(n.max(DEFAULT_GRID)))
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Stored coefficients `û(0..=K)`.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `û(k)` for any integer `k` (zero beyond the truncation).
    pub fn coeff(&self, k: i64) -> Complex<T> {
        let m = k.unsigned_abs() as usize;
        if m >= self.coeffs.len() {
            return Complex::zero();
        }
        if k >= 0 {
            self.coeffs[m]
        } else {
            self.coeffs[m].conj()
        }
    }

    /// `Σ_{k≥1} (ik)^m û(k) e^{ikx}`; the real signal derivative is twice its real part.
    fn half_series(&self, x: T, m: u32) -> Complex<T> {
        let step = cis(x);
        let mut e = step;
        let mut acc = Complex::zero();
        for k in 1..self.coeffs.len() {
            let ik = Complex::new(T::zero(), idx::<T>(k));
            let mut w = Complex::<T>::one();
            for _ in 0..m {
                w = w * ik;
            }
            acc = acc + w * self.coeffs[k] * e;
            e = e * step;
        }
        acc
    }

    pub fn eval(&self, x: T) -> T {
        self.half_series(x, 0).re * lit(2.0)
    }

    /// `m`-th derivative.
    pub fn derivative(&self, x: T, m: u32) -> T {
        self.half_series(x, m).re * lit(2.0)
    }

    /// Values on the uniform grid of `n` points starting at 0.
    pub fn samples(&self, n: usize) -> Vec<T> {
        let two_pi = T::PI() + T::PI();
        (0..n).map(|j| self.eval(two_pi * idx::<T>(j) / idx::<T>(n))).collect()
    }

    /// `‖u‖² = (1/2π)∫|u|² = 2 Σ_{k≥1} |û(k)|²`.
    pub fn norm_sq(&self) -> T {
        self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum::<T>() * lit(2.0)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Grid minimum and maximum over `grid_size` points.
    pub fn grid_range(&self) -> (T, T) {
        self.samples(self.grid_size)
            .into_iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Grid estimate of `‖u‖_∞`.
    pub fn sup_norm(&self) -> T {
        let (lo, hi) = self.grid_range();
        lo.abs().max(hi.abs())
    }

    /// `x ↦ u(x + s)`.
    pub fn rotated(&self, s: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * cis(idx::<T>(k) * s))
            .collect();
        Self { coeffs, grid_size: self.grid_size }
    }

    /// `x ↦ c·u(x)`.
    pub fn scaled(&self, c: T) -> Self {
        let coeffs = self.coeffs.iter().map(|&z| z * c).collect();
        Self { coeffs, grid_size: self.grid_size }
    }

    /// `Some(β)` when the signal is exactly `−β·cos x` with `β > 0`.
    pub fn cosine_amplitude(&self) -> Option<T> {
        let c1 = self.coeffs[1];
        let beta = -c1.re * lit(2.0);
        let clean = c1.im == T::zero() && self.coeffs[2..].iter().all(|c| c.is_zero());
        (clean && beta > T::zero()).then_some(beta)
    }


    pub fn to_json(&self) -> SignalJson {
        SignalJson {
            order: self.order(),
            coeffs: self.coeffs.iter().map(|c| [to64(c.re), to64(c.im)]).collect(),
        }
    }

    pub fn from_json(j: &SignalJson) -> Result<Self> {
        if j.coeffs.len() != j.order + 1 {
            return Err(Error::Serialization(format!(
                "expected {} coefficients for K = {}, found {}",
                j.order + 1,
                j.order,
                j.coeffs.len()
            )));
        }
        let coeffs = j.coeffs.iter().map(|&[re, im]| Complex::new(lit(re), lit(im))).collect();
        Self::new(coeffs)
    }
}

/// On-disk form: `{"K": int, "coeffs": [[re, im], ...]}` for `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalJson {
    #[serde(rename = "K")]
    pub order: usize,
    pub coeffs: Vec<[f64; 2]>,
}
