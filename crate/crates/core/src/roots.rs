//! Root isolation on monotone or bracketed functions.

use crate::scalar::{idx, lit, Real};

/// Bisection on a bracket with a sign change (or an exact zero at an end).
///
/// Returns `None` when `f(a)` and `f(b)` share a strict sign.
pub fn bisect<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Option<T> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Some(lo);
    }
    if fhi == T::zero() {
        return Some(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * lit(0.5))
}

/// Scans `n` uniform cells on `[a, b]` and returns every bracket with a sign
/// change. A node where `f` vanishes exactly is returned as a degenerate
/// bracket `(x, x)` once.
pub fn scan_brackets<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, n: usize) -> Vec<(T, T)> {
    let h = (b - a) / idx(n);
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for j in 1..=n {
        let x1 = if j == n { b } else { a + h * idx(j) };
        let f1 = f(x1);
        if f0 == T::zero() {
            out.push((x0, x0));
        } else if f1 != T::zero() && (f0 > T::zero()) != (f1 > T::zero()) {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == T::zero() {
        out.push((x0, x0));
    }
    out
}
