//! Small dense complex matrices: products, traces and LU solves.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(rrow) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Leading `k × k` block.
    pub fn block(&self, k: usize) -> Self {
        let k = k.min(self.dim);
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    /// Solves `self · x = b` by LU with partial pivoting.
    ///
    /// Returns the solution and the max-norm residual of the original system.
    pub fn solve(&self, b: &[Complex<T>]) -> Option<(Vec<Complex<T>>, T)> {
        let n = self.dim;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let (piv, pmag) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= T::tiny() {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let inv = Complex::<T>::one() / a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] * inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] = a[r * n + j] - factor * v;
                }
                x[r] = x[r] - factor * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in col + 1..n {
                s = s - a[col * n + j] * x[j];
            }
            x[col] = s / a[col * n + col];
        }
        let ax = self.matvec(&x);
        let residual = ax
            .iter()
            .zip(b)
            .fold(T::zero(), |m, (&p, &q)| m.max((p - q).norm()));
        Some((x, residual))
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let m = CMatrix::from_fn(3, |i, j| {
            Complex::new((i * 3 + j) as f64 + if i == j { 5.0 } else { 0.0 }, (i as f64) - (j as f64))
        });
        let x_true = vec![Complex::new(1.0, 2.0), Complex::new(-0.5, 0.0), Complex::new(0.0, 3.0)];
        let b = m.matvec(&x_true);
        let (x, res) = m.solve(&b).unwrap();
        assert!(res < 1e-12);
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_is_nilpotent() {
        let s = CMatrix::<f64>::from_fn(4, |i, j| if j == i + 1 { Complex::one() } else { Complex::zero() });
        let s4 = s.matmul(&s).matmul(&s).matmul(&s);
        assert_eq!(s4.max_abs(), 0.0);
        assert_eq!(s.trace(), Complex::zero());
        assert_eq!(CMatrix::<f64>::identity(3).trace(), Complex::new(3.0, 0.0));
    }
}
