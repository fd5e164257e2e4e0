//! Real nonsymmetric eigenproblem: Householder reduction to Hessenberg form
//! followed by the Francis double-shift QR iteration to real Schur form, and
//! back-substitution for the eigenvectors (the classic `orthes` / `hqr2`
//! pair from EISPACK).

use alloc::vec;
use alloc::vec::Vec;

use super::{canonicalize, Complex64, DenseMatrix, EigenPair};
use crate::error::{Error, Result};

/// Per-eigenvalue cap on QR sweeps before giving up.
const MAX_SWEEPS: usize = 60;

struct Work {
    n: usize,
    h: Vec<f64>,
    v: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Work {
    #[inline]
    fn h(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }
    #[inline]
    fn hm(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.h[i * self.n + j]
    }
    // `v` is stored by columns so the column sweeps are contiguous
    #[inline]
    fn v(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.n + i]
    }
    #[inline]
    fn vm(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.v[j * self.n + i]
    }

    fn orthes(&mut self, accumulate: bool) {
        let n = self.n;
        if n < 3 {
            if accumulate {
                for i in 0..n {
                    *self.vm(i, i) = 1.0;
                }
            }
            return;
        }
        let high = n - 1;
        let mut ort = vec![0.0; n];
        let mut fv = vec![0.0; n];
        for m in 1..high {
            let scale: f64 = (m..=high).map(|i| self.h(i, m - 1).abs()).sum();
            if scale == 0.0 {
                continue;
            }
            let mut h = 0.0;
            for i in (m..=high).rev() {
                ort[i] = self.h(i, m - 1) / scale;
                h += ort[i] * ort[i];
            }
            let mut g = libm::sqrt(h);
            if ort[m] > 0.0 {
                g = -g;
            }
            h -= ort[m] * g;
            ort[m] -= g;
            // H ← (I - u uᵀ/h) H, accumulated row by row
            fv[m..n].iter_mut().for_each(|f| *f = 0.0);
            for i in m..=high {
                let row = &self.h[i * n..(i + 1) * n];
                for j in m..n {
                    fv[j] += ort[i] * row[j];
                }
            }
            for i in m..=high {
                let oi = ort[i] / h;
                let row = &mut self.h[i * n..(i + 1) * n];
                for j in m..n {
                    row[j] -= fv[j] * oi;
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * self.h(i, j);
                }
                f /= h;
                for j in m..=high {
                    *self.hm(i, j) -= f * ort[j];
                }
            }
            ort[m] *= scale;
            *self.hm(m, m - 1) = scale * g;
        }
        if !accumulate {
            return;
        }
        for i in 0..n {
            *self.vm(i, i) = 1.0;
        }
        for m in (1..high).rev() {
            if self.h(m, m - 1) == 0.0 {
                continue;
            }
            for i in m + 1..=high {
                ort[i] = self.h(i, m - 1);
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * self.v(i, j);
                }
                g = (g / ort[m]) / self.h(m, m - 1);
                for i in m..=high {
                    *self.vm(i, j) += g * ort[i];
                }
            }
        }
    }

    /// Francis QR on the Hessenberg matrix. With `vectors`, also computes
    /// eigenvectors in `v` (real/imaginary parts in adjacent columns).
    #[allow(unused_assignments)]
    fn hqr2(&mut self, vectors: bool) -> Result<()> {
        let nn = self.n;
        let eps = f64::EPSILON;
        let mut exshift = 0.0;
        let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let (mut w, mut x, mut y): (f64, f64, f64);

        let mut norm = 0.0;
        for i in 0..nn {
            for j in i.saturating_sub(1)..nn {
                norm += self.h(i, j).abs();
            }
        }

        let mut n = nn as isize - 1;
        let mut iter = 0usize;
        while n >= 0 {
            let nu = n as usize;
            // look for a single small subdiagonal element
            let mut l = nu;
            while l > 0 {
                s = self.h(l - 1, l - 1).abs() + self.h(l, l).abs();
                if s == 0.0 {
                    s = norm;
                }
                if self.h(l, l - 1).abs() < eps * s {
                    break;
                }
                l -= 1;
            }

            if l == nu {
                // one root
                *self.hm(nu, nu) += exshift;
                self.re[nu] = self.h(nu, nu);
                self.im[nu] = 0.0;
                n -= 1;
                iter = 0;
            } else if l + 1 == nu {
                // two roots
                w = self.h(nu, nu - 1) * self.h(nu - 1, nu);
                p = (self.h(nu - 1, nu - 1) - self.h(nu, nu)) / 2.0;
                q = p * p + w;
                z = libm::sqrt(q.abs());
                *self.hm(nu, nu) += exshift;
                *self.hm(nu - 1, nu - 1) += exshift;
                x = self.h(nu, nu);
                if q >= 0.0 {
                    z = if p >= 0.0 { p + z } else { p - z };
                    self.re[nu - 1] = x + z;
                    self.re[nu] = self.re[nu - 1];
                    if z != 0.0 {
                        self.re[nu] = x - w / z;
                    }
                    self.im[nu - 1] = 0.0;
                    self.im[nu] = 0.0;
                    x = self.h(nu, nu - 1);
                    s = x.abs() + z.abs();
                    p = x / s;
                    q = z / s;
                    r = libm::sqrt(p * p + q * q);
                    p /= r;
                    q /= r;
                    for j in nu - 1..nn {
                        z = self.h(nu - 1, j);
                        *self.hm(nu - 1, j) = q * z + p * self.h(nu, j);
                        *self.hm(nu, j) = q * self.h(nu, j) - p * z;
                    }
                    for i in 0..=nu {
                        z = self.h(i, nu - 1);
                        *self.hm(i, nu - 1) = q * z + p * self.h(i, nu);
                        *self.hm(i, nu) = q * self.h(i, nu) - p * z;
                    }
                    if vectors {
                        for i in 0..nn {
                            z = self.v(i, nu - 1);
                            *self.vm(i, nu - 1) = q * z + p * self.v(i, nu);
                            *self.vm(i, nu) = q * self.v(i, nu) - p * z;
                        }
                    }
                } else {
                    self.re[nu - 1] = x + p;
                    self.re[nu] = x + p;
                    self.im[nu - 1] = z;
                    self.im[nu] = -z;
                }
                n -= 2;
                iter = 0;
            } else {
                // form shift
                x = self.h(nu, nu);
                y = 0.0;
                w = 0.0;
                if l < nu {
                    y = self.h(nu - 1, nu - 1);
                    w = self.h(nu, nu - 1) * self.h(nu - 1, nu);
                }
                if iter == 10 {
                    // exceptional shift
                    exshift += x;
                    for i in 0..=nu {
                        *self.hm(i, i) -= x;
                    }
                    s = self.h(nu, nu - 1).abs() + self.h(nu - 1, nu - 2).abs();
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }
                if iter == 30 {
                    s = (y - x) / 2.0;
                    s = s * s + w;
                    if s > 0.0 {
                        s = libm::sqrt(s);
                        if y < x {
                            s = -s;
                        }
                        s = x - w / ((y - x) / 2.0 + s);
                        for i in 0..=nu {
                            *self.hm(i, i) -= s;
                        }
                        exshift += s;
                        x = 0.964;
                        y = x;
                        w = x;
                    }
                }
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(Error::EigenNoConvergence {
                        converged: nn - 1 - nu,
                    });
                }

                // look for two consecutive small subdiagonal elements
                let mut m = nu - 2;
                loop {
                    z = self.h(m, m);
                    r = x - z;
                    s = y - z;
                    p = (r * s - w) / self.h(m + 1, m) + self.h(m, m + 1);
                    q = self.h(m + 1, m + 1) - z - r - s;
                    r = self.h(m + 2, m + 1);
                    s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    if self.h(m, m - 1).abs() * (q.abs() + r.abs())
                        < eps
                            * (p.abs()
                                * (self.h(m - 1, m - 1).abs() + z.abs() + self.h(m + 1, m + 1).abs()))
                    {
                        break;
                    }
                    m -= 1;
                }
                for i in m + 2..=nu {
                    *self.hm(i, i - 2) = 0.0;
                    if i > m + 2 {
                        *self.hm(i, i - 3) = 0.0;
                    }
                }

                // double QR step on rows l..=n, columns m..=n
                for k in m..nu {
                    let notlast = k != nu - 1;
                    if k != m {
                        p = self.h(k, k - 1);
                        q = self.h(k + 1, k - 1);
                        r = if notlast { self.h(k + 2, k - 1) } else { 0.0 };
                        x = p.abs() + q.abs() + r.abs();
                        if x == 0.0 {
                            continue;
                        }
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                    s = libm::sqrt(p * p + q * q + r * r);
                    if p < 0.0 {
                        s = -s;
                    }
                    if s == 0.0 {
                        continue;
                    }
                    if k != m {
                        *self.hm(k, k - 1) = -s * x;
                    } else if l != m {
                        *self.hm(k, k - 1) = -self.h(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = self.h(k, j) + q * self.h(k + 1, j);
                        if notlast {
                            p += r * self.h(k + 2, j);
                            *self.hm(k + 2, j) -= p * z;
                        }
                        *self.hm(k, j) -= p * x;
                        *self.hm(k + 1, j) -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * self.h(i, k) + y * self.h(i, k + 1);
                        if notlast {
                            p += z * self.h(i, k + 2);
                            *self.hm(i, k + 2) -= p * r;
                        }
                        *self.hm(i, k) -= p;
                        *self.hm(i, k + 1) -= p * q;
                    }
                    if vectors {
                        for i in 0..nn {
                            p = x * self.v(i, k) + y * self.v(i, k + 1);
                            if notlast {
                                p += z * self.v(i, k + 2);
                                *self.vm(i, k + 2) -= p * r;
                            }
                            *self.vm(i, k) -= p;
                            *self.vm(i, k + 1) -= p * q;
                        }
                    }
                }
            }
        }

        if !vectors || norm == 0.0 {
            return Ok(());
        }
        self.back_substitute(norm);
        Ok(())
    }

    #[allow(unused_assignments)]
    fn back_substitute(&mut self, norm: f64) {
        let nn = self.n;
        let eps = f64::EPSILON;
        let (mut r, mut s, mut z, mut t, mut w, mut x, mut y): (f64, f64, f64, f64, f64, f64, f64) =
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for n in (0..nn).rev() {
            let p = self.re[n];
            let q = self.im[n];
            if q == 0.0 {
                let mut l = n;
                *self.hm(n, n) = 1.0;
                for i in (0..n).rev() {
                    w = self.h(i, i) - p;
                    r = 0.0;
                    for j in l..=n {
                        r += self.h(i, j) * self.h(j, n);
                    }
                    if self.im[i] < 0.0 {
                        z = w;
                        s = r;
                    } else {
                        l = i;
                        if self.im[i] == 0.0 {
                            *self.hm(i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                        } else {
                            x = self.h(i, i + 1);
                            y = self.h(i + 1, i);
                            let qq = (self.re[i] - p) * (self.re[i] - p) + self.im[i] * self.im[i];
                            t = (x * s - z * r) / qq;
                            *self.hm(i, n) = t;
                            *self.hm(i + 1, n) = if x.abs() > z.abs() {
                                (-r - w * t) / x
                            } else {
                                (-s - y * t) / z
                            };
                        }
                        t = self.h(i, n).abs();
                        if (eps * t) * t > 1.0 {
                            for j in i..=n {
                                *self.hm(j, n) /= t;
                            }
                        }
                    }
                }
            } else if q < 0.0 {
                let mut l = n - 1;
                if self.h(n, n - 1).abs() > self.h(n - 1, n).abs() {
                    *self.hm(n - 1, n - 1) = q / self.h(n, n - 1);
                    *self.hm(n - 1, n) = -(self.h(n, n) - p) / self.h(n, n - 1);
                } else {
                    let (cr, ci) = cdiv(0.0, -self.h(n - 1, n), self.h(n - 1, n - 1) - p, q);
                    *self.hm(n - 1, n - 1) = cr;
                    *self.hm(n - 1, n) = ci;
                }
                *self.hm(n, n - 1) = 0.0;
                *self.hm(n, n) = 1.0;
                for i in (0..n.saturating_sub(1)).rev() {
                    let mut ra = 0.0;
                    let mut sa = 0.0;
                    for j in l..=n {
                        ra += self.h(i, j) * self.h(j, n - 1);
                        sa += self.h(i, j) * self.h(j, n);
                    }
                    w = self.h(i, i) - p;
                    if self.im[i] < 0.0 {
                        z = w;
                        r = ra;
                        s = sa;
                    } else {
                        l = i;
                        if self.im[i] == 0.0 {
                            let (cr, ci) = cdiv(-ra, -sa, w, q);
                            *self.hm(i, n - 1) = cr;
                            *self.hm(i, n) = ci;
                        } else {
                            x = self.h(i, i + 1);
                            y = self.h(i + 1, i);
                            let mut vr = (self.re[i] - p) * (self.re[i] - p) + self.im[i] * self.im[i]
                                - q * q;
                            let vi = (self.re[i] - p) * 2.0 * q;
                            if vr == 0.0 && vi == 0.0 {
                                vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                            }
                            let (cr, ci) =
                                cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                            *self.hm(i, n - 1) = cr;
                            *self.hm(i, n) = ci;
                            if x.abs() > z.abs() + q.abs() {
                                *self.hm(i + 1, n - 1) =
                                    (-ra - w * self.h(i, n - 1) + q * self.h(i, n)) / x;
                                *self.hm(i + 1, n) = (-sa - w * self.h(i, n) - q * self.h(i, n - 1)) / x;
                            } else {
                                let (cr, ci) = cdiv(
                                    -r - y * self.h(i, n - 1),
                                    -s - y * self.h(i, n),
                                    z,
                                    q,
                                );
                                *self.hm(i + 1, n - 1) = cr;
                                *self.hm(i + 1, n) = ci;
                            }
                        }
                        t = self.h(i, n - 1).abs().max(self.h(i, n).abs());
                        if (eps * t) * t > 1.0 {
                            for j in i..=n {
                                *self.hm(j, n - 1) /= t;
                                *self.hm(j, n) /= t;
                            }
                        }
                    }
                }
            }
        }
        // back transformation
        let mut col = vec![0.0; nn];
        for j in (0..nn).rev() {
            col.iter_mut().for_each(|c| *c = 0.0);
            for k in 0..=j {
                let hkj = self.h(k, j);
                if hkj == 0.0 {
                    continue;
                }
                let vk = &self.v[k * nn..(k + 1) * nn];
                for (c, x) in col.iter_mut().zip(vk) {
                    *c += hkj * x;
                }
            }
            self.v[j * nn..(j + 1) * nn].copy_from_slice(&col);
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

fn prepare(a: &DenseMatrix) -> Result<Work> {
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
    Ok(Work {
        n,
        h: a.as_slice().to_vec(),
        v: vec![0.0; n * n],
        re: vec![0.0; n],
        im: vec![0.0; n],
    })
}

/// Eigenvalues of a real square matrix (no eigenvectors).
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let mut work = prepare(a)?;
    if work.n == 0 {
        return Ok(Vec::new());
    }
    work.orthes(false);
    work.hqr2(false)?;
    Ok(work
        .re
        .iter()
        .zip(&work.im)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect())
}

/// All eigenpairs of a real square matrix.
///
/// Complex eigenvalues come in conjugate pairs with conjugate eigenvectors.
/// Vectors are normalized to unit length with the largest entry real and
/// positive.
pub fn eig_all(a: &DenseMatrix) -> Result<Vec<EigenPair>> {
    let mut work = prepare(a)?;
    let n = work.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    work.orthes(true);
    work.hqr2(true)?;

    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        let lam = Complex64::new(work.re[j], work.im[j]);
        if work.im[j] == 0.0 {
            let mut vec: Vec<Complex64> = (0..n).map(|i| Complex64::new(work.v(i, j), 0.0)).collect();
            canonicalize(&mut vec);
            out.push(EigenPair { value: lam, vector: vec });
            j += 1;
        } else {
            // columns j, j+1 hold real and imaginary parts for re + i·|im|
            let mut vec: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(work.v(i, j), work.v(i, j + 1)))
                .collect();
            canonicalize(&mut vec);
            let conj: Vec<Complex64> = vec.iter().map(|z| z.conj()).collect();
            out.push(EigenPair { value: lam, vector: vec });
            out.push(EigenPair {
                value: lam.conj(),
                vector: conj,
            });
            j += 2;
        }
    }
    Ok(out)
}
