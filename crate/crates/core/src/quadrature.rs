//! Quadrature kernels: Gauss–Legendre panels and adaptive Gauss–Kronrod.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{idx, lit, to64, Real};

/// Values that can be integrated: real or complex.
pub trait QuadValue<T>: Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = idx::<T>(n);
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess, then Newton.
            let mut x = (T::PI() * (idx::<T>(i) + lit(0.75)) / (nf + lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != T::zero() {
                dp = d;
            }
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single panel on `[a, b]`.
    pub fn integrate<V: QuadValue<T>>(&self, f: &mut impl FnMut(T) -> V, a: T, b: T) -> V {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(V::zero(), |acc, (&x, &w)| acc + f(mid + half * x) * (w * half))
    }

    /// Composite rule over `panels` equal panels.
    pub fn integrate_panels<V: QuadValue<T>>(
        &self,
        mut f: impl FnMut(T) -> V,
        a: T,
        b: T,
        panels: usize,
    ) -> V {
        let panels = panels.max(1);
        let h = (b - a) / idx(panels);
        (0..panels).fold(V::zero(), |acc, j| {
            let lo = a + h * idx(j);
            acc + self.integrate(&mut f, lo, lo + h)
        })
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = idx::<T>(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = idx::<T>(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Real, V: QuadValue<T>>(f: &mut impl FnMut(T) -> V, a: T, b: T) -> (V, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut kron = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * lit::<T>(WG[j / 2]);
        }
    }
    let est = kron * half.abs();
    let err = (kron - gauss).magnitude() * half.abs();
    (est, err)
}

/// Tolerances and limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_depth: usize,
    pub max_intervals: usize,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: lit(1e-12),
            rel_tol: lit(1e-12),
            max_depth: 48,
            max_intervals: 200_000,
        }
    }
}

struct Cell<T, V> {
    lo: T,
    hi: T,
    depth: usize,
    est: V,
    err: T,
}

impl<T: Real, V> PartialEq for Cell<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real, V> Eq for Cell<T, V> {}
impl<T: Real, V> PartialOrd for Cell<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Cell<T, V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod (G7/K15) quadrature: the cell with the
/// largest error estimate is bisected until the summed estimate meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<T: Real, V: QuadValue<T>>(
    mut f: impl FnMut(T) -> V,
    a: T,
    b: T,
    opts: AdaptiveOptions<T>,
) -> Result<V> {
    if a == b {
        return Ok(V::zero());
    }
    let fail = || Error::QuadratureFailure { a: to64(a), b: to64(b) };
    let (est, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Cell { lo: a, hi: b, depth: 0, est, err });
    let mut total_err = err;
    let mut running_est = est;
    // Cells that hit the depth limit stop refining but keep their estimates.
    let mut frozen_est = V::zero();
    let mut frozen_err = T::zero();
    let mut count = 1usize;
    loop {
        let total_est = running_est;
        let target = opts.abs_tol.max(opts.rel_tol * total_est.magnitude());
        // Guard against roundoff-dominated estimates.
        let noise = T::epsilon() * lit(50.0) * total_est.magnitude();
        if total_err <= target.max(noise) {
            return Ok(total_est);
        }
        let Some(worst) = heap.pop() else {
            return if frozen_err <= target.max(noise) { Ok(frozen_est) } else { Err(fail()) };
        };
        if worst.depth >= opts.max_depth {
            frozen_est = frozen_est + worst.est;
            frozen_err = frozen_err + worst.err;
            if frozen_err > target.max(noise) {
                return Err(fail());
            }
            continue;
        }
        count += 1;
        if count > opts.max_intervals {
            return Err(fail());
        }
        let mid = (worst.lo + worst.hi) * lit(0.5);
        let (e1, r1) = gk15(&mut f, worst.lo, mid);
        let (e2, r2) = gk15(&mut f, mid, worst.hi);
        total_err = total_err - worst.err + r1 + r2;
        running_est = running_est - worst.est + e1 + e2;
        heap.push(Cell { lo: worst.lo, hi: mid, depth: worst.depth + 1, est: e1, err: r1 });
        heap.push(Cell { lo: mid, hi: worst.hi, depth: worst.depth + 1, est: e2, err: r2 });
        if count.is_multiple_of(64) {
            // Re-sum to shed accumulated cancellation in the running total.
            total_err = heap.iter().fold(frozen_err, |acc, c: &Cell<T, V>| acc + c.err);
            running_est = heap.iter().fold(frozen_est, |acc, c| acc + c.est);
        }
    }
}

/// Adaptive quadrature with default tolerances.
pub fn integrate<T: Real, V: QuadValue<T>>(f: impl FnMut(T) -> V, a: T, b: T) -> Result<V> {
    adaptive(f, a, b, AdaptiveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let gl = GaussLegendre::<f64>::new(8);
        let s: f64 = gl.integrate(&mut |x: f64| x.powi(14) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn panels_integrate_oscillation() {
        let gl = GaussLegendre::<f64>::new(16);
        let s = gl.integrate_panels(|x: f64| Complex::new(0.0, 40.0 * x).exp(), 0.0, 1.0, 20);
        let exact = (Complex::new(0.0, 40.0_f64).exp() - 1.0) / Complex::new(0.0, 40.0);
        assert!((s - exact).norm() < 1e-13);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let s = integrate(|x: f64| x.sqrt(), 0.0, 1.0).unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_in_single_precision() {
        let s = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI).unwrap();
        assert!((s - 2.0).abs() < 1e-5);
    }

    #[test]
    fn adaptive_reports_failure() {
        let opts = AdaptiveOptions { abs_tol: 1e-14, rel_tol: 0.0, max_depth: 3, max_intervals: 100 };
        let r = adaptive(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
