//! Pseudo-spectral BO solver used as an independent oracle for the flow.

use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::fourier::PeriodicSignal;
use crate::scalar::{idx, lit, Real};

/// Grid and step of the reference solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeOptions {
    pub grid: usize,
    pub dt: f64,
    /// Abort once the L² norm exceeds this multiple of its initial value.
    pub blowup_ratio: f64,
}

impl Default for PdeOptions {
    fn default() -> Self {
        Self { grid: 256, dt: 1e-4, blowup_ratio: 10.0 }
    }
}

/// Samples of the solution on the uniform grid `x_j = 2πj/grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution<T> {
    pub t: T,
    pub x: Vec<T>,
    pub u: Vec<T>,
}

/// Integrating-factor RK4 for `u_t = −(u²)_x + ε H u_xx` in Fourier space,
/// with the quadratic term dealiased by the 2/3 rule.
///
/// Trusted for `ε ≥ 0.25` and `t ≤ 1` at the default grid.
pub fn bo_direct_solve<T: Real + FftNum>(
    u0: &PeriodicSignal<T>,
    epsilon: T,
    t: T,
    opts: PdeOptions,
) -> Result<PdeSolution<T>> {
    let n = opts.grid;
    if n < 2 * u0.order() + 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("pde grid {n} must be a power of two above 2K+1")));
    }
    if !(t >= T::zero()) || !(opts.dt > 0.0) {
        return Err(Error::InvalidParameter("pde needs t ≥ 0 and dt > 0".into()));
    }
    if epsilon < lit(0.25) || t > T::one() {
        return Err(Error::InvalidParameter(format!(
            "pde oracle is only trusted for epsilon ≥ 0.25 and t ≤ 1, got epsilon = {epsilon}, t = {t}"
        )));
    }
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let inv_n = T::one() / idx(n);
    let wave: Vec<T> = (0..n).map(|j| if j <= n / 2 { idx(j) } else { -idx::<T>(n - j) }).collect();
    let keep: Vec<bool> = wave.iter().map(|&k| k.abs() * lit(3.0) < idx(n)).collect();

    let x: Vec<T> = (0..n).map(|j| (T::PI() + T::PI()) * idx(j) * inv_n).collect();
    let mut v: Vec<Complex<T>> = x.iter().map(|&xj| Complex::new(u0.eval(xj), T::zero())).collect();
    fwd.process(&mut v);
    let norm0 = u0.norm().max(T::tiny());

    let steps = (t.to_f64().unwrap_or(0.0) / opts.dt).ceil() as usize;
    let dt = if steps == 0 { T::zero() } else { t / idx(steps) };
    let half = dt * lit(0.5);
    let (e1, e2): (Vec<_>, Vec<_>) = wave
        .iter()
        .map(|&k| {
            let l = Complex::new(T::zero(), epsilon * k * k.abs());
            ((l * half).exp(), (l * dt).exp())
        })
        .unzip();

    let mut scratch = vec![Complex::new(T::zero(), T::zero()); n];
    let mut nl = |vh: &[Complex<T>]| -> Vec<Complex<T>> {
        scratch.copy_from_slice(vh);
        inv.process(&mut scratch);
        for s in scratch.iter_mut() {
            let r = s.re * inv_n;
            *s = Complex::new(r * r, T::zero());
        }
        fwd.process(&mut scratch);
        scratch
            .iter()
            .zip(&wave)
            .zip(&keep)
            .map(|((&s, &k), &kp)| if kp { Complex::new(T::zero(), -k) * s } else { Complex::new(T::zero(), T::zero()) })
            .collect()
    };

    let sixth = dt / lit(6.0);
    for step in 0..steps {
        let a = nl(&v);
        let tmp: Vec<_> = (0..n).map(|j| e1[j] * (v[j] + a[j] * half)).collect();
        let b = nl(&tmp);
        let tmp: Vec<_> = (0..n).map(|j| e1[j] * v[j] + b[j] * half).collect();
        let c = nl(&tmp);
        let tmp: Vec<_> = (0..n).map(|j| e2[j] * v[j] + e1[j] * c[j] * dt).collect();
        let dd = nl(&tmp);
        for j in 0..n {
            v[j] = e2[j] * v[j] + (e2[j] * a[j] + (e1[j] * (b[j] + c[j])) * lit::<T>(2.0) + dd[j]) * sixth;
        }
        if step % 8 == 7 || step + 1 == steps {
            let norm = rms(&physical(&v, &*inv, inv_n));
            if !(norm <= norm0 * lit(opts.blowup_ratio)) {
                let ratio = if norm.is_finite() { to_f64(norm / norm0) } else { f64::INFINITY };
                return Err(Error::BlowupDetected { t: to_f64(dt * idx(step + 1)), ratio });
            }
        }
    }
    let u = physical(&v, &*inv, inv_n);
    Ok(PdeSolution { t, x, u })
}

fn physical<T: Real + FftNum>(v: &[Complex<T>], inv: &dyn rustfft::Fft<T>, inv_n: T) -> Vec<T> {
    let mut buf = v.to_vec();
    inv.process(&mut buf);
    buf.iter().map(|c| c.re * inv_n).collect()
}

fn rms<T: Real>(u: &[T]) -> T {
    (u.iter().map(|&v| v * v).sum::<T>() / idx(u.len())).sqrt()
}

fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_stays_zero() {
        let s = bo_direct_solve(&PeriodicSignal::<f64>::zero(1), 0.5, 0.1, PdeOptions::default()).unwrap();
        assert!(s.u.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn mass_and_energy_conserved() {
        let u0 = PeriodicSignal::cosine(1.0f64);
        let s = bo_direct_solve(&u0, 0.5, 0.5, PdeOptions::default()).unwrap();
        let mean: f64 = s.u.iter().sum::<f64>() / s.u.len() as f64;
        let l2: f64 = s.u.iter().map(|v| v * v).sum::<f64>() / s.u.len() as f64;
        assert!(mean.abs() < 1e-12);
        assert!((l2 - 0.5).abs() < 1e-8, "{l2}");
    }
}
