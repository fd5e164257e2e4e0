//! Eigenpairs nearest a complex shift.
//!
//! Small matrices go through the dense QR path. Larger ones use Arnoldi on
//! the shift-and-invert operator `(A - σI)⁻¹`, whose dominant eigenvalues
//! `1/(λ - σ)` correspond to the eigenvalues of `A` closest to `σ`. The
//! shifted matrix is factored once with [`BandLu`].

use alloc::vec;
use alloc::vec::Vec;

use super::{
    canonicalize, cdot, cnorm2, complex_eig, eig_all, eig_residual, BandLu, Complex64,
    ComplexMatrix, EigenPair, SparseMatrix,
};
use crate::error::{Error, Result};

/// Matrices up to this size are handled by the dense eigensolver.
pub const DENSE_EIG_THRESHOLD: usize = 400;

/// Relative residual accepted for shift-invert Ritz pairs.
const RITZ_TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 25;
const MAX_SUBSPACE: usize = 320;

fn distance(pair: &EigenPair, sigma: Complex64) -> f64 {
    (pair.value - sigma).norm()
}

fn sort_by_distance(pairs: &mut [EigenPair], sigma: Complex64) {
    pairs.sort_by(|a, b| {
        distance(a, sigma)
            .partial_cmp(&distance(b, sigma))
            .unwrap_or(core::cmp::Ordering::Equal)
            // keep conjugate pairs in a fixed order: positive imaginary first
            .then(b.value.im.partial_cmp(&a.value.im).unwrap_or(core::cmp::Ordering::Equal))
    });
}

/// The `k` eigenpairs of `a` closest to `sigma`, nearest first.
pub fn eig_near_shift(a: &SparseMatrix, sigma: Complex64, k: usize) -> Result<Vec<EigenPair>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if k == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let k = k.min(n);
    if n <= DENSE_EIG_THRESHOLD {
        let mut pairs = eig_all(&a.to_dense())?;
        sort_by_distance(&mut pairs, sigma);
        pairs.truncate(k);
        return Ok(pairs);
    }
    let lu = match BandLu::factor(a, sigma, 0) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => {
            let bumped = sigma + Complex64::new(1e-6 * (1.0 + sigma.norm()), 0.0);
            BandLu::factor(a, bumped, 0)?
        }
        Err(e) => return Err(e),
    };
    shift_invert_arnoldi(a, &lu, sigma, k)
}

fn shift_invert_arnoldi(
    a: &SparseMatrix,
    lu: &BandLu<Complex64>,
    sigma: Complex64,
    k: usize,
) -> Result<Vec<EigenPair>> {
    let n = a.rows();
    let anorm = a.norm_inf().max(f64::MIN_POSITIVE);
    let mut m = (2 * k + 30).max(40).min(n).min(MAX_SUBSPACE.max(k + 1));

    // deterministic start vector with energy in every component
    let mut start: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64;
            Complex64::new(1.0 + 0.5 * libm::sin(1.3 * t), 0.25 * libm::cos(0.7 * t))
        })
        .collect();

    let mut converged = 0;
    for _ in 0..MAX_RESTARTS {
        let (basis, h) = arnoldi(lu, &start, m)?;
        let dim = basis.len().min(h.cols());
        let mut proj = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                proj[(i, j)] = h[(i, j)];
            }
        }
        let mut ritz = complex_eig(&proj)?;
        ritz.sort_by(|x, y| {
            y.value
                .norm()
                .partial_cmp(&x.value.norm())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let wanted = k.min(ritz.len());
        let mut pairs = Vec::with_capacity(wanted);
        converged = 0;
        for r in ritz.iter().take(wanted) {
            if r.value.norm() == 0.0 {
                continue;
            }
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            for (j, coeff) in r.vector.iter().enumerate() {
                for (yi, bi) in y.iter_mut().zip(&basis[j]) {
                    *yi += bi * coeff;
                }
            }
            canonicalize(&mut y);
            let pair = EigenPair {
                value: sigma + Complex64::new(1.0, 0.0) / r.value,
                vector: y,
            };
            if eig_residual(a, &pair) <= RITZ_TOL * anorm {
                converged += 1;
            }
            pairs.push(pair);
        }
        if converged == k {
            sort_by_distance(&mut pairs, sigma);
            return Ok(pairs);
        }
        // explicit restart from the wanted Ritz vectors with a larger subspace
        start = vec![Complex64::new(0.0, 0.0); n];
        for (idx, p) in pairs.iter().enumerate() {
            let w = 1.0 / (1.0 + idx as f64);
            for (s, v) in start.iter_mut().zip(&p.vector) {
                *s += v * w;
            }
        }
        m = (m + m / 2).min(n).min(MAX_SUBSPACE.max(k + 1));
    }
    Err(Error::EigenNoConvergence { converged })
}

/// Arnoldi with two passes of classical Gram–Schmidt. Returns the basis and
/// the `(m+1) × m` Hessenberg matrix (truncated on breakdown).
fn arnoldi(
    lu: &BandLu<Complex64>,
    start: &[Complex64],
    m: usize,
) -> Result<(Vec<Vec<Complex64>>, ComplexMatrix)> {
    let nrm = cnorm2(start);
    if nrm == 0.0 {
        return Err(Error::InvalidArgument("zero start vector"));
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    basis.push(start.iter().map(|z| z / nrm).collect());
    let mut h = ComplexMatrix::zeros(m + 1, m);
    for j in 0..m {
        let mut w = lu.solve(&basis[j])?;
        let wnorm0 = cnorm2(&w);
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = cdot(b, &w);
                h[(i, j)] += c;
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= bi * c;
                }
            }
        }
        let beta = cnorm2(&w);
        h[(j + 1, j)] = Complex64::new(beta, 0.0);
        if beta <= 1e-13 * wnorm0 {
            // invariant subspace found
            let mut hh = ComplexMatrix::zeros(j + 1, j + 1);
            for r in 0..=j {
                for c in 0..=j {
                    hh[(r, c)] = h[(r, c)];
                }
            }
            return Ok((basis, hh));
        }
        if j + 1 < m || basis.len() <= m {
            basis.push(w.iter().map(|z| z / beta).collect());
        }
    }
    basis.truncate(m);
    Ok((basis, h))
}
