//! Complex Schur decomposition by shifted QR with Givens rotations.
//!
//! Only used on the small projected matrices produced by the Arnoldi
//! iteration, so no attempt is made at blocking or aggressive deflation.

use alloc::vec::Vec;

use super::{canonicalize, Complex64, ComplexMatrix, EigenPair, Scalar};
use crate::error::{Error, Result};

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Reduces `a` (n × n, row-major) to upper Hessenberg form in place and
/// returns the accumulated unitary transform.
fn hessenberg(a: &mut ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>();
        let alpha_norm = libm::sqrt(alpha_norm);
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.modulus() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.modulus()
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2 v v^H / |v|^2) A (I - 2 v v^H / |v|^2)
        for j in 0..n {
            let mut s = c0();
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + 1 + t, j)];
            }
            let s = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= vi * s;
            }
        }
        for i in 0..n {
            let mut s = c0();
            for (t, vi) in v.iter().enumerate() {
                s += a[(i, k + 1 + t)] * vi;
            }
            let s = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= s * vi.conj();
            }
        }
        for i in 0..n {
            let mut s = c0();
            for (t, vi) in v.iter().enumerate() {
                s += q[(i, k + 1 + t)] * vi;
            }
            let s = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + 1 + t)] -= s * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = c0();
        }
    }
    q
}

/// Rotation `[c s; -conj(s) c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bm = b.modulus();
    if bm == 0.0 {
        return (1.0, c0());
    }
    let am = a.modulus();
    if am == 0.0 {
        return (0.0, b.conj() / bm);
    }
    let r = libm::hypot(am, bm);
    (am / r, (a / am) * b.conj() / r)
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm_sqr() < (l2 - d).norm_sqr() {
        l1
    } else {
        l2
    }
}

/// Eigenpairs of a complex square matrix.
pub fn complex_eig(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut t = a.clone();
    let mut z = hessenberg(&mut t);
    let norm = t.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // deflate
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo - 1, lo - 1)].modulus() + t[(lo, lo)].modulus();
            let s = if s == 0.0 { norm } else { s };
            if t[(lo, lo - 1)].modulus() <= eps * s {
                t[(lo, lo - 1)] = c0();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::EigenNoConvergence { converged: n - 1 - hi });
        }
        let mut mu = wilkinson(
            t[(hi - 1, hi - 1)],
            t[(hi - 1, hi)],
            t[(hi, hi - 1)],
            t[(hi, hi)],
        );
        if iter % 11 == 10 {
            // exceptional shift
            mu = t[(hi, hi)] + Complex64::new(t[(hi, hi - 1)].modulus(), 0.0);
        }
        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            // right-multiply by G^H
            for i in 0..=(k + 1).min(hi) {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = x * c + y * s.conj();
                t[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }

    // eigenvectors of the triangular factor
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lam = t[(k, k)];
        let mut y = alloc::vec![c0(); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = c0();
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lam;
            if d.modulus() < eps * tnorm {
                d = Complex64::new(eps * tnorm, 0.0);
            }
            y[i] = -s / d;
        }
        let mut x = z.matvec(&y);
        canonicalize(&mut x);
        out.push(EigenPair { value: lam, vector: x });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_complex_matrix_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 4, 9, 30] {
            let data: Vec<Complex64> = (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let a = ComplexMatrix::from_row_major(n, n, data);
            let pairs = complex_eig(&a).unwrap();
            assert_eq!(pairs.len(), n);
            for p in pairs {
                let av = a.matvec(&p.vector);
                let r: f64 = av
                    .iter()
                    .zip(&p.vector)
                    .map(|(x, v)| (x - p.value * v).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(r < 1e-11 * a.norm_fro(), "n={n} residual {r}");
            }
        }
    }

    #[test]
    fn diagonal_values_recovered() {
        let d = [Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), Complex64::new(0.0, 0.0)];
        let mut a = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            a[(i, i)] = d[i];
        }
        let pairs = complex_eig(&a).unwrap();
        for want in d {
            assert!(pairs.iter().any(|p| (p.value - want).norm() < 1e-14));
        }
    }
}
