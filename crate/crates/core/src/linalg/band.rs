//! Banded LU with a dense border.
//!
//! The matrix is split as
//!
//! ```text
//! [ A  B ]   A: n × n banded (kl below, ku above the diagonal)
//! [ C  D ]   B: n × p, C: p × n, D: p × p, all dense
//! ```
//!
//! Elimination runs column by column through the band with partial pivoting
//! among the band rows. If the best band pivot has shrunk well below the
//! original column size and the border rows hold something larger (or the
//! pivot is zero), the remaining trailing block is gathered into a
//! dense matrix and finished with [`LuFactors`]. When `A` is well behaved this
//! only happens for the final `p × p` block, so the cost stays
//! `O(n · kl · (kl + ku))`.

use alloc::vec;
use alloc::vec::Vec;

use super::lu::{LuFactors, SINGULAR_RTOL};
use super::{Scalar, SparseMatrix};
use crate::error::{Error, Result};

/// A band pivot below this fraction of its column's original size, and also
/// smaller than the border entries, hands the rest over to the dense path.
const BAND_PIVOT_THRESHOLD: f64 = 1e-2;

/// Below this total size the dense path is used directly.
const DENSE_CUTOFF: usize = 48;

#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    p: usize,
    kl: usize,
    ku: usize,
    width: usize,
    /// Row-major windows; position `i` covers columns `i - kl ..= i + kl + ku`.
    band: Vec<T>,
    /// Multipliers of step `j` for band rows `j+1 ..= j+kl`.
    lower: Vec<T>,
    /// Border columns of the band rows, `n × p`.
    right: Vec<T>,
    /// Border rows, `p × (n + p)`; eliminated columns hold multipliers.
    bottom: Vec<T>,
    piv: Vec<usize>,
    switch: usize,
    tail: Option<LuFactors<T>>,
}

impl<T: Scalar> BandLu<T> {
    /// Factors `a - shift * I_n` where the last `border` rows and columns of
    /// `a` are dense and the leading block is banded. The shift only touches
    /// the leading block.
    pub fn factor(a: &SparseMatrix, shift: T, border: usize) -> Result<Self> {
        let total = a.rows();
        if a.cols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: a.cols(),
            });
        }
        if border > total {
            return Err(Error::InvalidArgument("border larger than matrix"));
        }
        if !a.is_finite() || !shift.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        let n = total - border;
        let p = border;
        let (kl, ku) = a.bandwidths(n);
        let width = 2 * kl + ku + 1;
        let scale = a.max_abs().max(shift.modulus());

        let mut lu = Self {
            n,
            p,
            kl,
            ku,
            width,
            band: vec![T::zero(); n * width],
            lower: vec![T::zero(); n * kl],
            right: vec![T::zero(); n * p],
            bottom: vec![T::zero(); p * total],
            piv: Vec::with_capacity(n),
            switch: 0,
            tail: None,
        };
        for (i, j, v) in a.iter() {
            let v = T::from_real(v);
            match (i < n, j < n) {
                (true, true) => *lu.at_mut(i, j) += v,
                (true, false) => lu.right[i * p + (j - n)] += v,
                (false, _) => lu.bottom[(i - n) * total + j] += v,
            }
        }
        if shift != T::zero() {
            for i in 0..n {
                *lu.at_mut(i, i) -= shift;
            }
        }

        let dense = total <= DENSE_CUTOFF || 2 * (kl + ku) + 1 >= n;
        lu.switch = if dense { 0 } else { lu.eliminate_band(scale) };
        lu.factor_tail(scale)?;
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.n + self.p
    }

    /// First column handled by the dense trailing factorization.
    pub fn dense_from(&self) -> usize {
        self.switch
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.band[self.slot(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let s = self.slot(i, j);
        &mut self.band[s]
    }

    /// Returns the first column that could not be eliminated in band mode.
    fn eliminate_band(&mut self, scale: f64) -> usize {
        let (n, p, kl, ku) = (self.n, self.p, self.kl, self.ku);
        let total = n + p;
        let tiny = SINGULAR_RTOL * scale.max(f64::MIN_POSITIVE);
        let mut col_scale = vec![0.0f64; n];
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for c in lo..=hi {
                col_scale[c] = col_scale[c].max(self.at(i, c).modulus());
            }
        }
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut q = j;
            let mut best = self.at(j, j).modulus();
            for i in j + 1..=last {
                let m = self.at(i, j).modulus();
                if m > best {
                    best = m;
                    q = i;
                }
            }
            let border_best = (0..p).fold(0.0f64, |m, r| m.max(self.bottom[r * total + j].modulus()));
            if best <= tiny
                || (best < BAND_PIVOT_THRESHOLD * col_scale[j] && best < border_best)
            {
                return j;
            }
            let hi = (j + kl + ku).min(n - 1);
            if q != j {
                for c in j..=hi {
                    let a = self.slot(j, c);
                    let b = self.slot(q, c);
                    self.band.swap(a, b);
                }
                for c in 0..p {
                    self.right.swap(j * p + c, q * p + c);
                }
            }
            self.piv.push(q);
            let pivot = self.at(j, j);
            for i in j + 1..=last {
                let m = self.at(i, j) / pivot;
                self.lower[j * kl + (i - j - 1)] = m;
                if m == T::zero() {
                    continue;
                }
                *self.at_mut(i, j) = T::zero();
                for c in j + 1..=hi {
                    let u = self.at(j, c);
                    *self.at_mut(i, c) -= m * u;
                }
                for c in 0..p {
                    let u = self.right[j * p + c];
                    self.right[i * p + c] -= m * u;
                }
            }
            for r in 0..p {
                let row = r * total;
                let m = self.bottom[row + j] / pivot;
                self.bottom[row + j] = m;
                if m == T::zero() {
                    continue;
                }
                for c in j + 1..=hi {
                    let u = self.at(j, c);
                    self.bottom[row + c] -= m * u;
                }
                for c in 0..p {
                    let u = self.right[j * p + c];
                    self.bottom[row + n + c] -= m * u;
                }
            }
        }
        n
    }

    fn factor_tail(&mut self, scale: f64) -> Result<()> {
        let (n, p, kl, ku) = (self.n, self.p, self.kl, self.ku);
        let total = n + p;
        let s = self.switch;
        let m = total - s;
        if m == 0 {
            return Ok(());
        }
        let mut dense = vec![T::zero(); m * m];
        for i in s..n {
            let lo = i.saturating_sub(kl).max(s);
            let hi = (i + kl + ku).min(n - 1);
            for c in lo..=hi {
                dense[(i - s) * m + (c - s)] = self.at(i, c);
            }
            for c in 0..p {
                dense[(i - s) * m + (n - s) + c] = self.right[i * p + c];
            }
        }
        for r in 0..p {
            for c in s..total {
                dense[(n - s + r) * m + (c - s)] = self.bottom[r * total + c];
            }
        }
        match LuFactors::factor_raw(m, dense, scale) {
            Ok(f) => {
                self.tail = Some(f);
                Ok(())
            }
            Err(Error::Singular { pivot }) => Err(Error::Singular { pivot: s + pivot }),
            Err(e) => Err(e),
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let (n, p, kl, ku) = (self.n, self.p, self.kl, self.ku);
        let total = n + p;
        if b.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: b.len(),
            });
        }
        let mut x = b.to_vec();
        let s = self.switch;
        for j in 0..s {
            let q = self.piv[j];
            if q != j {
                x.swap(j, q);
            }
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            let last = (j + kl).min(n - 1);
            for i in j + 1..=last {
                x[i] -= self.lower[j * kl + (i - j - 1)] * xj;
            }
            for r in 0..p {
                x[n + r] -= self.bottom[r * total + j] * xj;
            }
        }
        if let Some(tail) = &self.tail {
            let y = tail.solve(&x[s..])?;
            x[s..].copy_from_slice(&y);
        }
        for j in (0..s).rev() {
            let hi = (j + kl + ku).min(n - 1);
            let mut acc = x[j];
            for c in j + 1..=hi {
                acc -= self.at(j, c) * x[c];
            }
            for c in 0..p {
                acc -= self.right[j * p + c] * x[n + c];
            }
            x[j] = acc / self.at(j, j);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{lu_solve, Complex64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn banded_with_border(n: usize, p: usize, kl: usize, ku: usize, seed: u64) -> SparseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = n + p;
        let mut t = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = if i == j { 4.0 } else { 0.0 } + rng.gen_range(-1.0..1.0);
                t.push((i, j, v));
            }
            for c in 0..p {
                t.push((i, n + c, rng.gen_range(-1.0..1.0)));
            }
        }
        for r in 0..p {
            for j in 0..total {
                t.push((n + r, j, rng.gen_range(-1.0..1.0)));
            }
        }
        SparseMatrix::from_triplets(total, total, t)
    }

    fn check_against_dense(a: &SparseMatrix, border: usize) {
        let b: Vec<f64> = (0..a.rows()).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = BandLu::factor(a, 0.0, border).unwrap().solve(&b).unwrap();
        let y = lu_solve(&a.to_dense(), &b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10 * (1.0 + v.abs()), "{u} vs {v}");
        }
    }

    #[test]
    fn matches_dense_without_border() {
        check_against_dense(&banded_with_border(120, 0, 3, 2, 1), 0);
    }

    #[test]
    fn matches_dense_with_border() {
        check_against_dense(&banded_with_border(150, 2, 4, 4, 2), 2);
    }

    #[test]
    fn singular_leading_block_goes_dense_at_the_end() {
        // A = tridiag(-1, 2, -1) shifted so that its smallest eigenvalue is
        // zero, bordered by one row/column pair; the bordered matrix is regular.
        let n = 80;
        let lam = 4.0 * libm::sin(core::f64::consts::PI / (2.0 * (n as f64 + 1.0))).powi(2);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 - lam));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
            t.push((i, n, 1.0));
            t.push((n, i, 1.0));
        }
        let a = SparseMatrix::from_triplets(n + 1, n + 1, t);
        let lu = BandLu::factor(&a, 0.0, 1).unwrap();
        assert!(lu.dense_from() > n / 2);
        check_against_dense(&a, 1);
    }

    #[test]
    fn complex_shift() {
        let a = banded_with_border(100, 0, 2, 2, 3);
        let sigma = Complex64::new(0.5, 1.5);
        let lu = BandLu::factor(&a, sigma, 0).unwrap();
        let b: Vec<Complex64> = (0..100).map(|i| Complex64::new(1.0, i as f64 * 0.01)).collect();
        let x = lu.solve(&b).unwrap();
        let ax = a.matvec_complex(&x);
        for i in 0..100 {
            let r = ax[i] - sigma * x[i] - b[i];
            assert!(r.norm() < 1e-11);
        }
    }
}
