//! Single-well validation and the distribution-function geometry `F`, `x₋`, `x₊`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::PeriodicSignal;
use crate::quadrature::{adaptive, AdaptiveOptions, QuadValue};
use crate::roots::bisect;
use crate::scalar::{cis, idx, lit, to64, Real};

/// Sign-test tolerance on the derivative grids.
pub const SIGN_TOLERANCE: f64 = 1e-9;
/// Smallest accepted `|u'''|` at an inflection point.
pub const INFLECTION_TOLERANCE: f64 = 1e-8;
/// Size of the cached `η`-grid used to bracket the branch inverses.
pub const BRANCH_CACHE: usize = 4096;

/// A validated single well with its inverse branches.
///
/// `u(0) = u_min`, `u` increases on `(0, x_max)` and decreases on
/// `(x_max, 2π)`, with exactly two simple inflection points.
#[derive(Debug, Clone)]
pub struct SingleWellProfile<T> {
    signal: PeriodicSignal<T>,
    x_max: T,
    xi_minus: T,
    xi_plus: T,
    u_min: T,
    u_max: T,
    beta: Option<T>,
    cache: Vec<(T, T, T)>,
}

fn two_pi<T: Real>() -> T {
    T::PI() + T::PI()
}

fn classify_sign<T: Real>(v: T) -> i8 {
    let tol = lit::<T>(SIGN_TOLERANCE);
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

impl<T: Real> SingleWellProfile<T> {
    /// Validates the single-well shape on a grid of `grid_size ≥ 1024` points.
    pub fn classify(signal: &PeriodicSignal<T>, grid_size: usize) -> Result<Self> {
        if grid_size < 1024 {
            return Err(Error::InvalidParameter(format!("grid_size {grid_size} < 1024")));
        }
        let n = grid_size;
        let h = two_pi::<T>() / idx(n);
        let xs: Vec<T> = (0..n).map(|j| h * idx(j)).collect();
        let u0 = signal.eval(T::zero());
        let scale = T::one().max(signal.sup_norm());

        // Minimum at the origin.
        let (jmin, vmin) = xs
            .iter()
            .map(|&x| signal.eval(x))
            .enumerate()
            .fold((0, T::infinity()), |b, (j, v)| if v < b.1 { (j, v) } else { b });
        if vmin < u0 - lit::<T>(1e-12) * scale {
            return Err(Error::MinNotAtOrigin {
                at_origin: to64(u0),
                minimum: to64(vmin),
                location: to64(xs[jmin]),
            });
        }

        // u' must read + ... + [0] − ... − on the open grid.
        let d1: Vec<i8> = xs[1..].iter().map(|&x| classify_sign(signal.derivative(x, 1))).collect();
        let first_nonpos = d1.iter().position(|&s| s <= 0).ok_or_else(|| {
            Error::NotSingleWell("derivative never changes sign".into())
        })?;
        if first_nonpos == 0 {
            return Err(Error::NotSingleWell("derivative not positive right of the origin".into()));
        }
        let mut rest = first_nonpos;
        if d1[rest] == 0 {
            rest += 1;
        }
        if rest >= d1.len() || d1[rest..].iter().any(|&s| s >= 0) {
            return Err(Error::NotSingleWell(
                "derivative sign pattern is not a single rise followed by a single fall".into(),
            ));
        }
        // Grid index of the last positive derivative is first_nonpos (offset by one).
        let (lo, hi) = (xs[first_nonpos], xs[(rest + 1).min(n - 1)]);

        let beta = signal.cosine_amplitude();
        let (x_max, xi_minus, xi_plus) = if beta.is_some() {
            let pi = T::PI();
            (pi, pi * lit(0.5), pi * lit(1.5))
        } else {
            let x_max = bisect(|x| signal.derivative(x, 1), lo, hi, lit(1e-15))
                .ok_or_else(|| Error::NotSingleWell("could not isolate the maximum".into()))?;
            let (xi_minus, xi_plus) = Self::inflections(signal, &xs, x_max)?;
            (x_max, xi_minus, xi_plus)
        };
        if beta.is_some() {
            // The grid check still has to pass for the closed form.
            Self::inflections(signal, &xs, x_max)?;
        }
        for xi in [xi_minus, xi_plus] {
            let third = signal.derivative(xi, 3);
            if third.abs() < lit(INFLECTION_TOLERANCE) {
                return Err(Error::DegenerateInflection { at: to64(xi), third_derivative: to64(third) });
            }
        }

        let u_min = u0;
        let u_max = signal.eval(x_max);
        let mut profile = Self {
            signal: signal.clone(),
            x_max,
            xi_minus,
            xi_plus,
            u_min,
            u_max,
            beta,
            cache: Vec::new(),
        };
        if beta.is_none() {
            profile.cache = profile.build_cache();
        }
        Ok(profile)
    }

    /// Locates the two inflection points from the `u''` sign pattern.
    fn inflections(signal: &PeriodicSignal<T>, xs: &[T], x_max: T) -> Result<(T, T)> {
        let n = xs.len();
        let d2: Vec<i8> = xs.iter().map(|&x| classify_sign(signal.derivative(x, 2))).collect();
        if d2[0] <= 0 {
            return Err(Error::NotSingleWell("second derivative not positive at the minimum".into()));
        }
        // Sign changes between consecutive nonzero samples, allowing isolated zeros.
        let mut changes: Vec<(usize, usize)> = Vec::new();
        let mut prev = 0usize;
        let mut j = 1usize;
        while j <= n {
            let jj = j % n;
            if d2[jj] == 0 {
                if d2[(j + 1) % n] == 0 {
                    return Err(Error::NotSingleWell("flat stretch in the second derivative".into()));
                }
                j += 1;
                continue;
            }
            if d2[jj] != d2[prev % n] {
                changes.push((prev, j));
            }
            prev = j;
            j += 1;
        }
        if changes.len() != 2 {
            return Err(Error::NotSingleWell(format!(
                "expected exactly two inflection points, found {}",
                changes.len()
            )));
        }
        let at = |k: usize| if k >= n { two_pi::<T>() } else { xs[k] };
        let root = |(a, b): (usize, usize)| {
            bisect(|x| signal.derivative(x, 2), at(a), at(b), lit(1e-15))
                .ok_or_else(|| Error::NotSingleWell("could not isolate an inflection".into()))
        };
        let xi_minus = root(changes[0])?;
        let xi_plus = root(changes[1])?;
        if !(xi_minus < x_max && xi_plus > x_max) {
            return Err(Error::NotSingleWell("inflections do not straddle the maximum".into()));
        }
        Ok((xi_minus, xi_plus))
    }

    fn build_cache(&self) -> Vec<(T, T, T)> {
        let m = BRANCH_CACHE;
        (0..m)
            .map(|j| {
                let eta = self.u_min + (self.u_max - self.u_min) * idx(j) / idx(m - 1);
                if j == 0 {
                    (self.u_min, T::zero(), two_pi())
                } else if j == m - 1 {
                    (self.u_max, self.x_max, self.x_max)
                } else {
                    let f = |x: T| self.signal.eval(x) - eta;
                    let xm = bisect(f, T::zero(), self.x_max, lit(1e-13)).unwrap_or(T::zero());
                    let xp = bisect(f, self.x_max, two_pi(), lit(1e-13)).unwrap_or(two_pi());
                    (eta, xm, xp)
                }
            })
            .collect()
    }

    pub fn signal(&self) -> &PeriodicSignal<T> {
        &self.signal
    }
    pub fn x_max(&self) -> T {
        self.x_max
    }
    pub fn xi_minus(&self) -> T {
        self.xi_minus
    }
    pub fn xi_plus(&self) -> T {
        self.xi_plus
    }
    pub fn u_min(&self) -> T {
        self.u_min
    }
    pub fn u_max(&self) -> T {
        self.u_max
    }
    /// `Some(β)` when the closed cosine forms are in use.
    pub fn closed_form(&self) -> Option<T> {
        self.beta
    }

    /// Refines a branch inverse inside the cached bracket.
    fn branch(&self, eta: T, plus: bool) -> T {
        let m = self.cache.len();
        let s = (eta - self.u_min) / (self.u_max - self.u_min) * idx(m - 1);
        let j = s.floor().to_usize().unwrap_or(0).min(m - 2);
        let (a, b) = if plus {
            (self.cache[j + 1].2, self.cache[j].2)
        } else {
            (self.cache[j].1, self.cache[j + 1].1)
        };
        let f = |x: T| self.signal.eval(x) - eta;
        let tol = lit(1e-14);
        bisect(f, a, b, tol).unwrap_or_else(|| {
            let (lo, hi) = if plus { (self.x_max, two_pi()) } else { (T::zero(), self.x_max) };
            bisect(f, lo, hi, tol).unwrap_or(if plus { hi } else { lo })
        })
    }

    /// Left branch inverse: `x₋(η) ∈ [0, x_max]` with `u(x₋) = η`.
    pub fn x_minus(&self, eta: T) -> T {
        if eta <= self.u_min {
            return T::zero();
        }
        if eta >= self.u_max {
            return self.x_max;
        }
        match self.beta {
            Some(beta) => (-eta / beta).acos(),
            None => self.branch(eta, false),
        }
    }

    /// Right branch inverse: `x₊(η) ∈ [x_max, 2π]` with `u(x₊) = η`.
    pub fn x_plus(&self, eta: T) -> T {
        if eta <= self.u_min {
            return two_pi();
        }
        if eta >= self.u_max {
            return self.x_max;
        }
        match self.beta {
            Some(beta) => two_pi::<T>() - (-eta / beta).acos(),
            None => self.branch(eta, true),
        }
    }

    /// `F(η) = Leb{u ≥ η}/2π`.
    pub fn distribution(&self, eta: T) -> T {
        if eta <= self.u_min {
            return T::one();
        }
        if eta >= self.u_max {
            return T::zero();
        }
        match self.beta {
            Some(beta) => (eta / beta).acos() / T::PI(),
            None => (self.x_plus(eta) - self.x_minus(eta)) / two_pi(),
        }
    }

    /// Integrates `g(η)` over `[a, b] ⊂ [u_min, u_max]` after the substitution
    /// `η = m − h·cos s`, which removes the square-root endpoint behaviour of
    /// the branch inverses.
    pub fn integrate_eta<V: QuadValue<T>>(&self, mut g: impl FnMut(T) -> V, a: T, b: T) -> Result<V> {
        let mid = (self.u_max + self.u_min) * lit(0.5);
        let half = (self.u_max - self.u_min) * lit(0.5);
        let s_of = |eta: T| ((mid - eta) / half).max(-T::one()).min(T::one()).acos();
        let opts = AdaptiveOptions { abs_tol: lit(1e-13), rel_tol: lit(1e-12), ..AdaptiveOptions::default() };
        adaptive(
            |s: T| {
                let eta = mid - half * s.cos();
                g(eta) * (half * s.sin())
            },
            s_of(a),
            s_of(b),
            opts,
        )
    }

    fn check_range(&self, a: T, b: T) -> Result<()> {
        let tol = lit::<T>(1e-12) * T::one().max(self.u_max - self.u_min);
        if a < self.u_min - tol || b > self.u_max + tol || a > b + tol {
            return Err(Error::RangeError {
                a: to64(a),
                b: to64(b),
                lo: to64(self.u_min),
                hi: to64(self.u_max),
            });
        }
        Ok(())
    }

    /// `∫_a^b F(η) dη` for `u_min ≤ a ≤ b ≤ u_max`.
    pub fn integral_of_f(&self, a: T, b: T) -> Result<T> {
        self.check_range(a, b)?;
        let a = a.max(self.u_min);
        let b = b.min(self.u_max);
        if a >= b {
            return Ok(T::zero());
        }
        match self.beta {
            Some(beta) => Ok(cosine_antiderivative(beta, b) - cosine_antiderivative(beta, a)),
            None => self.integrate_eta(|eta| self.distribution(eta), a, b),
        }
    }

    /// `(i/2kπ) ∫ (e^{−ik(x₊+2ηt)} − e^{−ik(x₋+2ηt)}) dη` over the whole range.
    ///
    /// At `t = 0` this is `û(k)`; for `t > 0` it is the Fourier coefficient of
    /// the signed branch sum of the Burgers solution.
    pub fn branch_fourier(&self, k: i64, t: T) -> Result<Complex<T>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be nonzero".into()));
        }
        let kf = T::from_i64(k).expect("mode index");
        let integral = self.integrate_eta(
            |eta| {
                let drift = (eta + eta) * t;
                cis(-kf * (self.x_plus(eta) + drift)) - cis(-kf * (self.x_minus(eta) + drift))
            },
            self.u_min,
            self.u_max,
        )?;
        Ok(integral * Complex::new(T::zero(), T::one() / (kf * two_pi::<T>())))
    }

    /// `û(k)` recovered from the branch inverses.
    pub fn fourier_via_branches(&self, k: i64) -> Result<Complex<T>> {
        self.branch_fourier(k, T::zero())
    }
}

/// Antiderivative of `arccos(η/β)/π`.
pub fn cosine_antiderivative<T: Real>(beta: T, eta: T) -> T {
    let y = (eta / beta).max(-T::one()).min(T::one());
    beta / T::PI() * (y * y.acos() - (T::one() - y * y).max(T::zero()).sqrt())
}

/// Rotates a signal so that its global minimum sits at the origin.
///
/// Returns the rotated signal and the shift `s` with `new(x) = old(x + s)`.
pub fn rotate_min_to_origin<T: Real>(signal: &PeriodicSignal<T>) -> (PeriodicSignal<T>, T) {
    let n = signal.grid_size().max(1024);
    let h = two_pi::<T>() / idx(n);
    let j = (0..n)
        .map(|j| (j, signal.eval(h * idx(j))))
        .fold((0, T::infinity()), |b, (j, v)| if v < b.1 { (j, v) } else { b })
        .0;
    let x0 = h * idx(j);
    let s = bisect(|x| signal.derivative(x, 1), x0 - h, x0 + h, lit(1e-15)).unwrap_or(x0);
    let s = if s < T::zero() { s + two_pi() } else { s };
    (signal.rotated(s), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cosine() -> SingleWellProfile<f64> {
        SingleWellProfile::classify(&PeriodicSignal::cosine(1.0), 8192).unwrap()
    }

    #[test]
    fn cosine_geometry() {
        let p = cosine();
        assert_eq!(p.x_max(), PI);
        assert!((p.xi_minus() - PI / 2.0).abs() < 1e-15);
        assert!((p.xi_plus() - 1.5 * PI).abs() < 1e-15);
        assert!((p.u_min() + 1.0).abs() < 1e-15 && (p.u_max() - 1.0).abs() < 1e-15);
        assert!((p.distribution(0.0) - 0.5).abs() < 1e-15);
        assert!((p.x_minus(0.0) - PI / 2.0).abs() < 1e-15);
        assert!((p.x_plus(0.0) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn cosine_integrals() {
        let p = cosine();
        assert!((p.integral_of_f(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((p.integral_of_f(0.0, 1.0).unwrap() - 1.0 / PI).abs() < 1e-14);
        assert_eq!(p.integral_of_f(0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(p.integral_of_f(-2.0, 0.0), Err(Error::RangeError { .. })));
        let q = p.integrate_eta(|e| p.distribution(e), 0.0, 1.0).unwrap();
        assert!((q - 1.0 / PI).abs() < 1e-11);
    }

    #[test]
    fn cosine_fourier_via_branches() {
        let p = cosine();
        assert!((p.fourier_via_branches(1).unwrap() - Complex::new(-0.5, 0.0)).norm() < 1e-8);
        assert!(p.fourier_via_branches(2).unwrap().norm() < 1e-8);
        assert!(p.fourier_via_branches(0).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        let shifted = PeriodicSignal::cosine(1.0).rotated(0.5);
        assert!(matches!(SingleWellProfile::classify(&shifted, 4096), Err(Error::MinNotAtOrigin { .. })));
        let double = PeriodicSignal::from_modes(&[Complex::new(0.0, 0.0), Complex::new(-0.5, 0.0)]).unwrap();
        assert!(matches!(SingleWellProfile::classify(&double, 4096), Err(Error::NotSingleWell(_))));
        assert!(SingleWellProfile::classify(&PeriodicSignal::cosine(1.0), 512).is_err());
    }

    #[test]
    fn rotation_helper_recovers_cosine() {
        let shifted = PeriodicSignal::cosine(1.0).rotated(0.5);
        let (back, s) = rotate_min_to_origin(&shifted);
        assert!((s - (2.0 * PI - 0.5)).abs() < 1e-12);
        assert!((back.eval(0.0) + 1.0).abs() < 1e-14);
        assert!(SingleWellProfile::classify(&back, 4096).is_ok());
    }

    #[test]
    fn generic_profile_branches() {
        let s = PeriodicSignal::<f64>::from_modes(&[Complex::new(-0.5, 0.0), Complex::new(-0.1, 0.0)]).unwrap();
        let p = SingleWellProfile::classify(&s, 8192).unwrap();
        assert!(p.closed_form().is_none());
        for &eta in &[-0.5, 0.0, 0.3] {
            let (xm, xp) = (p.x_minus(eta), p.x_plus(eta));
            assert!((s.eval(xm) - eta).abs() < 1e-12);
            assert!((s.eval(xp) - eta).abs() < 1e-12);
        }
        for k in 1..=3i64 {
            let z = p.fourier_via_branches(k).unwrap();
            assert!((z - s.coeff(k)).norm() < 1e-8, "k={k}: {z} vs {}", s.coeff(k));
        }
        let total = p.integral_of_f(p.u_min(), p.u_max()).unwrap();
        assert!((total + p.u_min()).abs() < 1e-8);
    }
}
