//! Matrix of multiplication by `e^{ix}` in the Lax eigenbasis and the
//! inversion formula built on it.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{LaxSpectrum, GAP_CLIP};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cis, lit, to64, Real};

/// Which route assembled a [`ShiftMatrixData`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSource {
    /// `M_{n,p} = ⟨f_p|e^{ix}f_n⟩` from the stored eigenvectors.
    Eigenvectors,
    /// Closed formula in the eigenvalues, gaps and angles.
    SpectralFormula,
}

/// `M`, `X` and `Y` feeding `Πu(z) = ⟨(I − zM)⁻¹X|Y⟩`.
///
/// The dimension is one less than the spectrum length because row `n`
/// needs the data of index `n + 1`.
#[derive(Debug, Clone)]
pub struct ShiftMatrixData<T> {
    pub m: CMatrix<T>,
    pub x: Vec<Complex<T>>,
    pub y: Vec<Complex<T>>,
    pub source: ShiftSource,
    pub epsilon: T,
    /// Entries taken from the eigenvector route because a gap was closed.
    pub fallback_entries: usize,
}

impl<T: Real> ShiftMatrixData<T> {
    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// Shift matrix at the spectrum's own angles.
pub fn shift_matrix<T: Real>(spec: &LaxSpectrum<T>, mode: ShiftSource) -> Result<ShiftMatrixData<T>> {
    shift_matrix_evolved(spec, mode, None)
}

/// Shift matrix after advancing every angle `θ_n` by `shifts[n]`.
///
/// Under the flow `M_{n,p} ↦ M_{n,p} e^{i(δ_{n+1} − δ_p)}` and `Y_n ↦ Y_n e^{iδ_n}`.
pub fn shift_matrix_evolved<T: Real>(
    spec: &LaxSpectrum<T>,
    mode: ShiftSource,
    shifts: Option<&[T]>,
) -> Result<ShiftMatrixData<T>> {
    let d = spec.len();
    if d < 2 {
        return Err(Error::InvalidParameter("spectrum too short for a shift matrix".into()));
    }
    let dim = d - 1;
    let delta = |n: usize| shifts.map_or(T::zero(), |s| s[n]);
    if let Some(s) = shifts {
        if s.len() < d {
            return Err(Error::InvalidParameter("phase shift array shorter than the spectrum".into()));
        }
    }
    match mode {
        ShiftSource::Eigenvectors => {
            let vecs = spec.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
            let m = CMatrix::from_fn(dim, |n, p| eigvec_entry(vecs, n, p) * cis(delta(n + 1) - delta(p)));
            let y: Vec<Complex<T>> = (0..dim).map(|n| spec.one_overlaps[n] * cis(delta(n))).collect();
            let x = (0..dim).map(|p| y[p] * -spec.lambdas[p]).collect();
            Ok(ShiftMatrixData { m, x, y, source: mode, epsilon: spec.epsilon, fallback_entries: 0 })
        }
        ShiftSource::SpectralFormula => formula_route(spec, dim, &delta),
    }
}

fn eigvec_entry<T: Real>(vecs: &[Vec<Complex<T>>], n: usize, p: usize) -> Complex<T> {
    // ⟨f_p|S f_n⟩ = Σ_j f_p[j] conj(f_n[j−1]).
    vecs[p][1..].iter().zip(&vecs[n]).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b.conj())
}

fn formula_route<T: Real>(spec: &LaxSpectrum<T>, dim: usize, delta: &dyn Fn(usize) -> T) -> Result<ShiftMatrixData<T>> {
    let clip = lit::<T>(GAP_CLIP);
    let vecs = spec.eigenvectors.as_ref();
    let g = |n: usize| if n == 0 { T::one() } else { spec.gaps[n] };
    let closed = |n: usize| n > 0 && spec.gaps[n] < clip;
    let theta = |n: usize| spec.thetas[n] + delta(n);
    let mut fallback = 0usize;
    let mut m = CMatrix::zeros(dim);
    for n in 0..dim {
        for p in 0..dim {
            m[(n, p)] = if p == n + 1 {
                Complex::new(spec.mus[n + 1].max(T::zero()).sqrt(), T::zero())
            } else {
                let denom = spec.lambdas[p] - spec.lambdas[n] - spec.epsilon;
                if denom.abs() < lit(1e-14) {
                    return Err(Error::ZeroGapDivision { n, p });
                }
                if closed(n + 1) || closed(p) {
                    match vecs {
                        Some(v) => {
                            fallback += 1;
                            eigvec_entry(v, n, p) * cis(delta(n + 1) - delta(p))
                        }
                        None => Complex::zero(),
                    }
                } else {
                    let w = spec.mus[n + 1] * spec.kappas[p] / spec.kappas[n + 1] * g(n + 1) * g(p);
                    cis(theta(n + 1) - theta(p)) * (w.max(T::zero()).sqrt() / denom)
                }
            };
        }
    }
    let y: Vec<Complex<T>> = (0..dim)
        .map(|n| match vecs {
            Some(_) if closed(n) => {
                fallback += 1;
                spec.one_overlaps[n] * cis(delta(n))
            }
            _ => cis(theta(n)) * (g(n) * spec.kappas[n]).max(T::zero()).sqrt(),
        })
        .collect();
    let x = (0..dim).map(|p| y[p] * -spec.lambdas[p]).collect();
    Ok(ShiftMatrixData {
        m,
        x,
        y,
        source: ShiftSource::SpectralFormula,
        epsilon: spec.epsilon,
        fallback_entries: fallback,
    })
}

/// `Πu(z) = ⟨(I − zM)⁻¹X|Y⟩` for `|z| ≤ 1`; `u(x) = 2 Re Πu(e^{ix})`.
pub fn invert<T: Real>(data: &ShiftMatrixData<T>, z: Complex<T>) -> Result<Complex<T>> {
    if z.norm() > T::one() + lit(1e-12) {
        return Err(Error::InvalidParameter(format!("|z| = {} exceeds 1", z.norm())));
    }
    let dim = data.dim();
    let a = CMatrix::from_fn(dim, |i, j| {
        let id: Complex<T> = if i == j { Complex::one() } else { Complex::zero() };
        id - z * data.m[(i, j)]
    });
    let scale = T::one() + data.x.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let (v, residual) = a.solve(&data.x).ok_or(Error::SolveFailure { residual: f64::INFINITY })?;
    if residual > lit::<T>(1e-9) * scale {
        return Err(Error::SolveFailure { residual: to64(residual) });
    }
    Ok(v.iter().zip(&data.y).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b.conj()))
}

/// `ε Tr(M^k)`, which reproduces `û(k)`.
pub fn trace_moment<T: Real>(data: &ShiftMatrixData<T>, k: usize) -> Complex<T> {
    assert!(k >= 1, "trace moments start at k = 1");
    if k == 1 {
        return data.m.trace() * data.epsilon;
    }
    let mut p = data.m.clone();
    for _ in 1..k {
        p = p.matmul(&data.m);
    }
    p.trace() * data.epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::PeriodicSignal;
    use crate::lax::diagonalize;

    #[test]
    fn zero_signal_gives_pure_shift() {
        let s = diagonalize(&PeriodicSignal::<f64>::zero(1), 1.0, 16).unwrap();
        for mode in [ShiftSource::Eigenvectors, ShiftSource::SpectralFormula] {
            let d = shift_matrix(&s, mode).unwrap();
            for n in 0..d.dim() {
                for p in 0..d.dim() {
                    let want = if p == n + 1 { 1.0 } else { 0.0 };
                    assert!((d.m[(n, p)].re - want).abs() < 1e-12 && d.m[(n, p)].im.abs() < 1e-12);
                }
            }
            for k in 1..4 {
                assert!(trace_moment(&d, k).norm() < 1e-12);
            }
            assert!(invert(&d, Complex::new(0.3, 0.4)).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn missing_eigenvectors_reported() {
        let s = LaxSpectrum::from_eigenvalues(1.0, vec![-0.5, 0.75, 1.75], vec![0.0; 3]).unwrap();
        assert!(matches!(shift_matrix(&s, ShiftSource::Eigenvectors), Err(Error::MissingEigenvectors)));
        assert!(shift_matrix(&s, ShiftSource::SpectralFormula).is_ok());
    }

    #[test]
    fn cosine_trace_and_mean() {
        let s = diagonalize(&PeriodicSignal::cosine(1.0f64), 0.5, 128).unwrap();
        let d = shift_matrix(&s, ShiftSource::Eigenvectors).unwrap();
        assert!((trace_moment(&d, 1) - Complex::new(-0.5, 0.0)).norm() < 1e-6);
        assert!(trace_moment(&d, 2).norm() < 1e-6);
        assert!(invert(&d, Complex::zero()).unwrap().norm() < 1e-7);
        for n in 0..d.dim() - 1 {
            let sup = d.m[(n, n + 1)];
            assert!(sup.im.abs() < 1e-12 && sup.re >= 0.0);
            assert!((sup.re * sup.re - s.mus[n + 1]).abs() < 1e-8);
        }
    }
}
