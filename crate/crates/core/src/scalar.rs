//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the library is generic over (`f32` or `f64`).
///
/// The dense Hermitian eigensolver is dispatched through this trait so that
/// the rest of the crate never names a concrete precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine-level tolerance used for "exactly zero" tests.
    fn tiny() -> Self;

    /// Eigen-decomposition of a row-major Hermitian matrix.
    ///
    /// Eigenvalues come back ascending; column `j` of the returned
    /// column-major buffer is the eigenvector of eigenvalue `j`.
    fn hermitian_eigen(dim: usize, rows: &[Complex<Self>]) -> Option<(Vec<Self>, Vec<Complex<Self>>)>;

    /// Ascending eigenvalues only.
    fn hermitian_eigenvalues(dim: usize, rows: &[Complex<Self>]) -> Vec<Self>;
}

macro_rules! impl_real {
    ($t:ty, $tiny:expr) => {
        impl Real for $t {
            fn tiny() -> Self {
                $tiny
            }

            fn hermitian_eigen(
                dim: usize,
                rows: &[Complex<Self>],
            ) -> Option<(Vec<Self>, Vec<Complex<Self>>)> {
                let m = DMatrix::from_row_slice(dim, dim, rows);
                let eig = SymmetricEigen::try_new(m, <$t>::EPSILON, 0)?;
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| {
                    eig.eigenvalues[a]
                        .partial_cmp(&eig.eigenvalues[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                });
                let values: Vec<$t> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
                if values.iter().any(|v| !v.is_finite()) {
                    return None;
                }
                let mut vectors = Vec::with_capacity(dim * dim);
                for &j in &order {
                    vectors.extend(eig.eigenvectors.column(j).iter().copied());
                }
                Some((values, vectors))
            }

            fn hermitian_eigenvalues(dim: usize, rows: &[Complex<Self>]) -> Vec<Self> {
                let m = DMatrix::from_row_slice(dim, dim, rows);
                let mut values: Vec<$t> = m.symmetric_eigenvalues().iter().copied().collect();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                values
            }
        }
    };
}

impl_real!(f64, 1e-300);
impl_real!(f32, 1e-37);

/// Converts an `f64` literal into the working precision.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in the working precision")
}

/// Converts a count or index into the working precision.
#[inline]
pub fn idx<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("index representable in the working precision")
}

/// Signed integer variant of [`idx`].
#[inline]
pub fn int<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in the working precision")
}

/// Lossy export to `f64` for reports and error payloads.
#[inline]
pub fn to64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = theta % two_pi;
    if r > T::PI() {
        r = r - two_pi;
    } else if r <= -T::PI() {
        r = r + two_pi;
    }
    r
}
