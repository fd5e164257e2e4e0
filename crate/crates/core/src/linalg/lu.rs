use alloc::vec::Vec;

use super::{Complex64, ComplexMatrix, DenseMatrix, Scalar};
use crate::error::{Error, Result};

/// Pivots at or below `SINGULAR_RTOL * max|A|` are treated as zero.
pub(crate) const SINGULAR_RTOL: f64 = 16.0 * f64::EPSILON;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuFactors<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        let scale = a.max_abs();
        Self::factor_raw(a.rows(), a.as_slice().to_vec(), scale)
    }

    /// Factors a row-major `n × n` buffer; `scale` sets the singularity
    /// threshold.
    pub(crate) fn factor_raw(n: usize, mut lu: Vec<T>, scale: f64) -> Result<Self> {
        let tol = SINGULAR_RTOL * scale.max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].modulus();
            for i in k + 1..n {
                let m = lu[i * n + k].modulus();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best <= tol {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                if m == T::zero() {
                    continue;
                }
                lu[i * n + k] = m;
                let (upper, lower) = lu.split_at_mut(i * n);
                let prow = &upper[k * n + k + 1..k * n + n];
                for (x, &y) in lower[k + 1..n].iter_mut().zip(prow) {
                    *x -= m * y;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    LuFactors::factor(a)?.solve(b)
}

/// Complex counterpart of [`lu_solve`].
pub fn complex_lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    LuFactors::factor(a)?.solve(b)
}
