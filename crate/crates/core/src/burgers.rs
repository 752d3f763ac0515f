//! Multivalued inviscid Burgers solution by characteristics and its signed
//! branch sum.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::roots::{bisect, scan_brackets};
use crate::scalar::{cis, idx, int, lit, to64, Real};
use crate::single_well::SingleWellProfile;

/// Cells in the scan for critical points of the characteristic map.
pub const ROOT_GRID: usize = 16384;
/// Perturbation used when a tangency produces an even branch count.
pub const TANGENCY_SHIFT: f64 = 1e-9;

/// Ascending branch values `u₀^B < … < u_{2P}^B` at one `(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet<T> {
    pub t: T,
    pub x: T,
    pub values: Vec<T>,
    /// Position actually solved at (differs from `x` after a tangency retry).
    pub solved_x: T,
}

impl<T: Real> BranchSet<T> {
    /// Number of folds `P`.
    pub fn folds(&self) -> usize {
        self.values.len().saturating_sub(1) / 2
    }

    pub fn retried(&self) -> bool {
        self.solved_x != self.x
    }
}

/// Breaking times and positions generated by the two inflection points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakingData<T> {
    pub t_plus: T,
    pub t_minus: T,
    pub x_plus: T,
    pub x_minus: T,
}

/// `(t, x) = (−1/(2u₀'(ξ)), ξ − u₀(ξ)/u₀'(ξ))` at `ξ₊` and `ξ₋`.
///
/// Only the inflection where `u₀' < 0` breaks forward in time; the other
/// time is negative.
pub fn breaking_points<T: Real>(profile: &SingleWellProfile<T>) -> BreakingData<T> {
    let u = profile.signal();
    let at = |xi: T| {
        let d = u.derivative(xi, 1);
        (-T::one() / (d + d), xi - u.eval(xi) / d)
    };
    let (t_plus, x_plus) = at(profile.xi_plus());
    let (t_minus, x_minus) = at(profile.xi_minus());
    BreakingData { t_plus, t_minus, x_plus, x_minus }
}

/// Characteristic map `φ(y) = y + 2t·u₀(y)` at a fixed time, split into
/// monotone pieces over one period.
///
/// The critical points of `φ` depend on `t` only, so a branch query at any
/// `x` reduces to one bisection per piece and lift.
#[derive(Debug, Clone)]
pub struct Characteristics<'a, T> {
    profile: &'a SingleWellProfile<T>,
    t: T,
    pieces: Vec<(T, T)>,
}

impl<'a, T: Real> Characteristics<'a, T> {
    pub fn new(profile: &'a SingleWellProfile<T>, t: T) -> Result<Self> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
        }
        let two_pi = T::PI() + T::PI();
        let u = profile.signal();
        let w = |y: T| T::one() + (t + t) * u.derivative(y, 1);
        let mut crit: Vec<T> = if t == T::zero() {
            Vec::new()
        } else {
            scan_brackets(w, T::zero(), two_pi, ROOT_GRID)
                .into_iter()
                .filter_map(|(a, b)| if a == b { Some(a) } else { bisect(w, a, b, lit(1e-15)) })
                .filter(|&y| y < two_pi)
                .collect()
        };
        crit.dedup_by(|a, b| (*a - *b).abs() < lit(1e-13));
        let pieces = if crit.is_empty() {
            vec![(T::zero(), two_pi)]
        } else {
            let mut p: Vec<(T, T)> = crit.windows(2).map(|c| (c[0], c[1])).collect();
            p.push((crit[crit.len() - 1], crit[0] + two_pi));
            p
        };
        Ok(Self { profile, t, pieces })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Number of monotone pieces of the characteristic map per period.
    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    fn solve(&self, x: T) -> Vec<T> {
        let two_pi = T::PI() + T::PI();
        let u = self.profile.signal();
        let phi = |y: T| y + (self.t + self.t) * u.eval(y);
        let mut values = Vec::new();
        for &(a, b) in &self.pieces {
            let (pa, pb) = (phi(a), phi(b));
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            let m_lo = ((lo - x) / two_pi).ceil().to_i64().unwrap_or(0);
            let m_hi = ((hi - x) / two_pi).floor().to_i64().unwrap_or(-1);
            for m in m_lo..=m_hi {
                let target = x + two_pi * int::<T>(m);
                if let Some(y) = bisect(|y| phi(y) - target, a, b, lit(1e-14)) {
                    values.push(u.eval(y));
                }
            }
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        // Periodic lifts and fold endpoints produce coincident values.
        values.dedup_by(|a, b| (*a - *b).abs() < lit(1e-10));
        values
    }

    /// All branch values at `x`; an even count is retried at `x ± 1e−9`.
    pub fn branches(&self, x: T) -> Result<BranchSet<T>> {
        let shift = lit::<T>(TANGENCY_SHIFT);
        let mut last = 0;
        for xs in [x, x + shift, x - shift] {
            let values = self.solve(xs);
            if values.len() % 2 == 1 {
                return Ok(BranchSet { t: self.t, x, values, solved_x: xs });
            }
            last = values.len();
        }
        Err(Error::EvenBranchCount { t: to64(self.t), x: to64(x), count: last })
    }
}

/// All branch values of the multivalued solution `v = u₀(x − 2vt)`.
///
/// An even count (tangency at a branch point) is retried once at `x ± 1e−9`.
/// For many queries at one time build a [`Characteristics`] instead.
pub fn branches<T: Real>(profile: &SingleWellProfile<T>, t: T, x: T) -> Result<BranchSet<T>> {
    Characteristics::new(profile, t)?.branches(x)
}

/// `Σ (−1)^n u_n^B`.
pub fn signed_sum<T: Real>(bs: &BranchSet<T>) -> Result<T> {
    if bs.values.len().is_multiple_of(2) {
        return Err(Error::EvenBranchCount { t: to64(bs.t), x: to64(bs.x), count: bs.values.len() });
    }
    Ok(bs
        .values
        .iter()
        .enumerate()
        .map(|(n, &v)| if n % 2 == 0 { v } else { -v })
        .sum())
}

/// `u^B_alt(t, x)`.
pub fn ualt<T: Real>(profile: &SingleWellProfile<T>, t: T, x: T) -> Result<T> {
    signed_sum(&branches(profile, t, x)?)
}

/// Largest `|v − u₀(x − 2vt)|` over a branch set.
pub fn implicit_residual<T: Real>(profile: &SingleWellProfile<T>, bs: &BranchSet<T>) -> T {
    let u = profile.signal();
    bs.values
        .iter()
        .map(|&v| (v - u.eval(bs.solved_x - (v + v) * bs.t)).abs())
        .fold(T::zero(), T::max)
}

/// Fourier coefficient of `u^B_alt(t)` from the branch-inverse integral.
pub fn fourier_ualt<T: Real>(profile: &SingleWellProfile<T>, t: T, k: i64) -> Result<Complex<T>> {
    profile.branch_fourier(k, t)
}

/// `u^B_alt(t)` sampled on `n` uniform points of `[0, 2π)`.
pub fn ualt_samples<T: Real>(profile: &SingleWellProfile<T>, t: T, n: usize) -> Result<Vec<T>> {
    let ch = Characteristics::new(profile, t)?;
    let h = (T::PI() + T::PI()) / idx(n);
    (0..n).map(|j| signed_sum(&ch.branches(h * idx(j))?)).collect()
}

/// `(1/2π)∫ u^B_alt(t, x) e^{−ikx} dx` by the uniform-grid rule.
pub fn fourier_direct<T: Real>(profile: &SingleWellProfile<T>, t: T, k: i64, n: usize) -> Result<Complex<T>> {
    let h = (T::PI() + T::PI()) / idx(n);
    let kf = int::<T>(k);
    let samples = ualt_samples(profile, t, n)?;
    let sum = samples
        .iter()
        .enumerate()
        .fold(Complex::zero(), |acc, (j, &v)| acc + cis(-kf * h * idx(j)) * v);
    Ok(sum / idx::<T>(n))
}

/// Mean-square norm `((1/2π)∫|u^B_alt|²)^{1/2}` on an `n`-point grid.
pub fn l2_norm_ualt<T: Real>(profile: &SingleWellProfile<T>, t: T, n: usize) -> Result<T> {
    let s = ualt_samples(profile, t, n)?;
    Ok((s.iter().map(|&v| v * v).sum::<T>() / idx(n)).sqrt())
}
