//! Closed-form consequences of the spectral formulas: the product formula
//! for `a_n`, its bounds, the sinc approximation and the Toeplitz series.

use num_complex::Complex;
use num_traits::Zero;

use super::{LaxSpectrum, GAP_CLIP};
use crate::single_well::SingleWellProfile;
use crate::scalar::{cis, idx, int, lit, Real};

/// `a_n γ_n γ_{n+1}/ε²` from the eigenvalue product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnValue<T> {
    pub value: T,
    /// Analytic factor for `p ≥ d`, assuming closed gaps beyond the block.
    pub tail_factor: T,
    pub tail_estimate: T,
    /// False when the spectrum's tail estimate exceeds `1e-8`.
    pub reliable: bool,
}

/// `∏_{p≥0, p≠n} (1 − ε²/(λ_p−λ_n)²)` for `n ≥ 1`.
///
/// Telescoping `μ_{n+1}κ_n/κ_{n+1}` gives this product with the `p = 0`
/// factor included; the variant with `1 + ε/(λ_n−λ₀)` in its place
/// overshoots by `1/(1 − ε/(λ_n−λ₀))`.
///
/// The product over the stored block is completed by the telescoping
/// factor `(M+g−1)/(M+g)`, `M = d−n`, which is exact when every gap past
/// the block vanishes.
pub fn a_n_closed_form<T: Real>(spec: &LaxSpectrum<T>, n: usize) -> AnValue<T> {
    let d = spec.len();
    assert!(n >= 1 && n + 1 < d, "a_n needs 1 <= n <= d-2");
    let eps = spec.epsilon;
    let l = &spec.lambdas;
    let mut prod = T::one();
    for p in 0..d {
        if p != n {
            let r = eps / (l[p] - l[n]);
            prod = prod * (T::one() - r * r);
        }
    }
    let g = (l[d - 1] - l[n]) / eps - idx::<T>(d - 1 - n);
    let big_m = idx::<T>(d - n) + g;
    let tail_factor = (big_m - T::one()) / big_m;
    AnValue {
        value: prod * tail_factor,
        tail_factor,
        tail_estimate: spec.quality.tail_estimate,
        reliable: spec.quality.tail_estimate <= lit(1e-8),
    }
}

/// Largest values of the quantities bounded by `2, 8, 4, 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnBounds<T> {
    pub max_product: T,
    pub max_a: T,
    pub max_a_gamma_n: T,
    pub max_a_gamma_n1: T,
}

impl<T: Real> AnBounds<T> {
    pub fn holds(&self, tol: T) -> bool {
        self.max_product <= lit::<T>(2.0) + tol
            && self.max_a <= lit::<T>(8.0) + tol
            && self.max_a_gamma_n <= lit::<T>(4.0) + tol
            && self.max_a_gamma_n1 <= lit::<T>(4.0) + tol
    }
}

/// Scans `n = 1..d−2`.
pub fn an_bounds<T: Real>(spec: &LaxSpectrum<T>) -> AnBounds<T> {
    let eps = spec.epsilon;
    let mut b = AnBounds {
        max_product: T::zero(),
        max_a: T::zero(),
        max_a_gamma_n: T::zero(),
        max_a_gamma_n1: T::zero(),
    };
    for n in 1..spec.len().saturating_sub(1) {
        let a = spec.a_coeffs[n];
        let (gn, gn1) = (spec.gaps[n], spec.gaps[n + 1]);
        b.max_product = b.max_product.max(a * gn * gn1 / (eps * eps));
        b.max_a = b.max_a.max(a);
        b.max_a_gamma_n = b.max_a_gamma_n.max(a * gn / eps);
        b.max_a_gamma_n1 = b.max_a_gamma_n1.max(a * gn1 / eps);
    }
    b
}

/// Counts index pairs violating `ε²/(λ_p−λ_n)² ≤ 1/(p−n)²` or, for
/// `p ∉ {n, n+1}`, `ε/|λ_p−λ_n−ε| ≤ 2/|p−n|`.
pub fn gap_bound_violations<T: Real>(spec: &LaxSpectrum<T>, tol: T) -> usize {
    let eps = spec.epsilon;
    let l = &spec.lambdas;
    let d = spec.len();
    let mut bad = 0;
    for n in 0..d {
        for p in 0..d {
            if p == n {
                continue;
            }
            let k = int::<T>(p as i64 - n as i64);
            let r = eps / (l[p] - l[n]);
            if r * r > T::one() / (k * k) + tol {
                bad += 1;
            }
            if p != n + 1 && eps / (l[p] - l[n] - eps).abs() > lit::<T>(2.0) / k.abs() + tol {
                bad += 1;
            }
        }
    }
    bad
}

/// `sin(x)/x`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-8) {
        T::one() - x * x / lit(6.0)
    } else {
        x.sin() / x
    }
}

/// Summary of `|a_nγ_nγ_{n+1}/ε² − sinc²(πF(−λ_n))|` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct SincDeviation<T> {
    pub max: T,
    pub median: T,
    pub worst_index: usize,
    pub count: usize,
    /// `(n, λ_n + ε, deviation)`.
    pub entries: Vec<(usize, T, T)>,
}

/// Compares the product formula with its sinc approximation for every
/// `n ≥ 1` with `λ_n + ε ∈ [lo, hi]` and both adjacent gaps open.
pub fn sinc_deviation<T: Real>(
    spec: &LaxSpectrum<T>,
    profile: &SingleWellProfile<T>,
    lo: T,
    hi: T,
) -> SincDeviation<T> {
    let clip = lit::<T>(GAP_CLIP);
    let mut entries = Vec::new();
    for n in 1..spec.len().saturating_sub(1) {
        let nu = spec.lambdas[n] + spec.epsilon;
        if nu < lo || nu > hi || spec.gaps[n] < clip || spec.gaps[n + 1] < clip {
            continue;
        }
        let v = a_n_closed_form(spec, n).value;
        let s = sinc(T::PI() * profile.distribution(-spec.lambdas[n]));
        entries.push((n, nu, (v - s * s).abs()));
    }
    let mut devs: Vec<T> = entries.iter().map(|e| e.2).collect();
    devs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let (worst_index, max) = entries
        .iter()
        .fold((0, T::zero()), |b, e| if e.2 > b.1 { (e.0, e.2) } else { b });
    let median = if devs.is_empty() { T::nan() } else { devs[devs.len() / 2] };
    SincDeviation { max, median, worst_index, count: entries.len(), entries }
}

/// `Σ_{m₁+…+m_k=0} ∏ 1/(m_i − c) = (−1)^k π^{k−1} sin(kπc)/(k c sin(πc)^k)`.
pub fn toeplitz_closed_form<T: Real>(c: T, k: u32) -> T {
    let kf = T::from_u32(k).expect("small k");
    let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
    sign * T::PI().powi(k as i32 - 1) * (kf * T::PI() * c).sin() / (kf * c * (T::PI() * c).sin().powi(k as i32))
}

/// The same series truncated to `|m_i| ≤ cutoff`, by iterated convolution.
pub fn toeplitz_truncated_sum<T: Real>(c: T, k: u32, cutoff: usize) -> T {
    assert!(k >= 1);
    let m = cutoff as i64;
    let g = |j: i64| T::one() / (int::<T>(j) - c);
    if k == 1 {
        return g(0);
    }
    // dist[s + off] = Σ over the first j terms with partial sum s.
    let mut span = m;
    let mut dist: Vec<T> = (-m..=m).map(g).collect();
    for _ in 1..k - 1 {
        let new_span = span + m;
        let mut next = vec![T::zero(); (2 * new_span + 1) as usize];
        for (i, &v) in dist.iter().enumerate() {
            let s = i as i64 - span;
            for j in -m..=m {
                let t = (s + j + new_span) as usize;
                next[t] = next[t] + v * g(j);
            }
        }
        dist = next;
        span = new_span;
    }
    (-m..=m)
        .filter(|&j| (-j).abs() <= span)
        .map(|j| dist[(-j + span) as usize] * g(j))
        .sum()
}

/// `ε Σ sinc(kπF(−λ_n)) e^{−ik(x₊+x₋)(−λ_n)/2}` over `n ≥ 1` with
/// `λ_n + ε ∈ [−max u + δ, −min u − δ]`.
pub fn riemann_sum_fourier<T: Real>(
    spec: &LaxSpectrum<T>,
    profile: &SingleWellProfile<T>,
    k: i64,
    delta: T,
) -> Complex<T> {
    let (lo, hi) = (-profile.u_max() + delta, -profile.u_min() - delta);
    let kf = int::<T>(k);
    let mut acc = Complex::zero();
    for n in 1..spec.len() {
        let nu = spec.lambdas[n] + spec.epsilon;
        if nu < lo || nu > hi {
            continue;
        }
        let eta = -spec.lambdas[n];
        let mid = (profile.x_plus(eta) + profile.x_minus(eta)) * lit(0.5);
        acc = acc + cis(-kf * mid) * sinc(kf * T::PI() * profile.distribution(eta));
    }
    acc * spec.epsilon
}
