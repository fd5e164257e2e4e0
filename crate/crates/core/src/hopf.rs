//! The Griewank–Reddien extended system
//!
//! ```text
//! F(u, λ)            = 0
//! F_u(u, λ) v + μ w  = 0
//! F_u(u, λ) w − μ v  = 0
//! ⟨c, v⟩             = 0
//! ⟨c, w⟩ − 1         = 0
//! ```
//!
//! whose regular roots are Hopf points with critical eigenpair
//! `F_u (v + i w) = i μ (v + i w)`.
//!
//! Linear solves reorder the unknowns so that `(u_j, v_j, w_j)` sit next to
//! each other, which keeps the extended Jacobian banded apart from the two
//! border rows and columns belonging to `λ` and `μ`.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{eig_near_shift, norm2, BandLu, Complex64, SparseMatrix};
use crate::stability::{build_hopf_guess, HopfGuess};
use crate::steady::{continue_branch, ContinuationTrace, NewtonOptions, DEFAULT_K_EIGS};
use crate::system::{Controls, DynamicalSystem};

/// Unknowns of the extended system; flattened as `(u, v, w, λ, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GRState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
}

impl GRState {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * self.dim() + 2);
        x.extend_from_slice(&self.u);
        x.extend_from_slice(&self.v);
        x.extend_from_slice(&self.w);
        x.push(self.lambda);
        x.push(self.mu);
        x
    }

    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() < 5 || !(x.len() - 2).is_multiple_of(3) {
            return Err(Error::InvalidArgument("flattened state must have length 3n+2"));
        }
        let n = (x.len() - 2) / 3;
        Ok(Self {
            u: x[..n].to_vec(),
            v: x[n..2 * n].to_vec(),
            w: x[2 * n..3 * n].to_vec(),
            lambda: x[3 * n],
            mu: x[3 * n + 1],
        })
    }

    fn check(&self, n: usize) -> Result<()> {
        for len in [self.u.len(), self.v.len(), self.w.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        Ok(())
    }
}

/// Rotates and scales `(v₀, w₀)` so that `⟨c, v⟩ = 0` and `⟨c, w⟩ = 1`:
/// `v + i w = r e^{iθ} (v₀ + i w₀)`.
pub fn normalize_eigenpair(
    v0: &[f64],
    w0: &[f64],
    c: &[f64],
    inner: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let cv = inner(c, v0);
    let cw = inner(c, w0);
    if !(cv * cv + cw * cw > 1e-12) {
        return Err(Error::NormalizationOrthogonal);
    }
    let mut theta = libm::atan2(cv, cw);
    let mut s = cv * libm::sin(theta) + cw * libm::cos(theta);
    if s < 0.0 {
        theta += PI;
        s = -s;
    }
    if s.abs() < 1e-12 {
        return Err(Error::NormalizationOrthogonal);
    }
    let r = 1.0 / s;
    let (sn, cs) = (libm::sin(theta), libm::cos(theta));
    let v = v0.iter().zip(w0).map(|(a, b)| r * (a * cs - b * sn)).collect();
    let w = v0.iter().zip(w0).map(|(a, b)| r * (a * sn + b * cs)).collect();
    Ok((v, w))
}

/// Normalized starting state built from a stability guess.
pub fn state_from_guess<S: DynamicalSystem + ?Sized>(
    sys: &S,
    guess: &HopfGuess,
    c: &[f64],
) -> Result<GRState> {
    let (v, w) = normalize_eigenpair(&guess.v, &guess.w, c, |a, b| sys.inner_product(a, b))?;
    Ok(GRState {
        u: guess.u.clone(),
        v,
        w,
        lambda: guess.lambda,
        mu: guess.mu,
    })
}

/// The extended residual, length `3n + 2`.
pub fn gr_residual<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    x: &GRState,
    c: &[f64],
) -> Result<Vec<f64>> {
    let n = sys.dim();
    x.check(n)?;
    let jac = sys.jacobian(&x.u, x.lambda, th);
    let mut out = Vec::with_capacity(3 * n + 2);
    out.extend(sys.residual(&x.u, x.lambda, th));
    let jv = jac.matvec(&x.v);
    let jw = jac.matvec(&x.w);
    out.extend(jv.iter().zip(&x.w).map(|(a, b)| a + x.mu * b));
    out.extend(jw.iter().zip(&x.v).map(|(a, b)| a - x.mu * b));
    out.push(sys.inner_product(c, &x.v));
    out.push(sys.inner_product(c, &x.w) - 1.0);
    if out.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("extended residual"));
    }
    Ok(out)
}

/// The extended Jacobian in the natural `(u, v, w, λ, μ)` ordering.
pub fn gr_jacobian<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    x: &GRState,
    c: &[f64],
) -> Result<SparseMatrix> {
    let n = sys.dim();
    x.check(n)?;
    let (u, lam, mu) = (&x.u, x.lambda, x.mu);
    let jac = sys.jacobian(u, lam, th);
    let hv = sys.hessian_action(u, lam, th, &x.v);
    let hw = sys.hessian_action(u, lam, th, &x.w);
    let fl = sys.d_lambda(u, lam, th);
    let flv = sys.d_lambda_u_action(u, lam, th, &x.v);
    let flw = sys.d_lambda_u_action(u, lam, th, &x.w);
    let rc = sys.riesz(c);

    let (cl, cm) = (3 * n, 3 * n + 1);
    let mut t = Vec::with_capacity(3 * jac.nnz() + hv.nnz() + hw.nnz() + 12 * n);
    for (i, j, a) in jac.iter() {
        t.push((i, j, a));
        t.push((n + i, n + j, a));
        t.push((2 * n + i, 2 * n + j, a));
    }
    for (i, j, a) in hv.iter() {
        t.push((n + i, j, a));
    }
    for (i, j, a) in hw.iter() {
        t.push((2 * n + i, j, a));
    }
    for i in 0..n {
        t.push((n + i, 2 * n + i, mu));
        t.push((2 * n + i, n + i, -mu));
        t.push((i, cl, fl[i]));
        t.push((n + i, cl, flv[i]));
        t.push((2 * n + i, cl, flw[i]));
        t.push((n + i, cm, x.w[i]));
        t.push((2 * n + i, cm, -x.v[i]));
        t.push((cl, n + i, rc[i]));
        t.push((cm, 2 * n + i, rc[i]));
    }
    let m = SparseMatrix::from_triplets(3 * n + 2, 3 * n + 2, t);
    if !m.is_finite() {
        return Err(Error::NonFinite("extended jacobian"));
    }
    Ok(m)
}

/// `(u_j, v_j, w_j)` interleaved, `λ` and `μ` last.
fn interleave(n: usize) -> Vec<usize> {
    let mut p = vec![0; 3 * n + 2];
    for j in 0..n {
        p[j] = 3 * j;
        p[n + j] = 3 * j + 1;
        p[2 * n + j] = 3 * j + 2;
    }
    p[3 * n] = 3 * n;
    p[3 * n + 1] = 3 * n + 1;
    p
}

/// Factorization of the extended Jacobian.
#[derive(Debug, Clone)]
pub struct ExtendedLu {
    perm: Vec<usize>,
    lu: BandLu<f64>,
}

impl ExtendedLu {
    /// Factors a matrix in the natural ordering. A singular matrix is
    /// reported as [`Error::NonRegularHopf`].
    pub fn factor(jac: &SparseMatrix) -> Result<Self> {
        let total = jac.rows();
        if total < 5 || !(total - 2).is_multiple_of(3) {
            return Err(Error::InvalidArgument("extended matrix must have size 3n+2"));
        }
        let perm = interleave((total - 2) / 3);
        let lu = match BandLu::factor(&jac.permute(&perm), 0.0, 2) {
            Ok(lu) => lu,
            Err(Error::Singular { .. }) => return Err(Error::NonRegularHopf),
            Err(e) => return Err(e),
        };
        Ok(Self { perm, lu })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut pb = vec![0.0; b.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            pb[p] = b[i];
        }
        let y = self.lu.solve(&pb)?;
        Ok(self.perm.iter().map(|&p| y[p]).collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HopfOptions {
    pub tol: f64,
    pub maxit: usize,
    /// Confirm with an eigensolve that `iμ` is an eigenvalue of `F_u`.
    pub verify: bool,
}

impl Default for HopfOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            maxit: 50,
            verify: true,
        }
    }
}

/// A converged root of the extended system.
#[derive(Debug, Clone)]
pub struct HopfPoint {
    pub state: GRState,
    /// Euclidean norm of the extended residual.
    pub residual: f64,
    /// `|iμ − nearest eigenvalue of F_u|`, NaN when not verified.
    pub eig_gap: f64,
    pub iterations: usize,
}

impl HopfPoint {
    pub fn lambda(&self) -> f64 {
        self.state.lambda
    }

    pub fn mu(&self) -> f64 {
        self.state.mu
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.state.mu
    }
}

/// Allowed distance between `iμ` and the spectrum of `F_u` at a Hopf point.
pub fn eig_gap_tolerance(mu: f64) -> f64 {
    1e-6 * (1.0 + mu.abs())
}

/// Distance from `iμ` to the nearest eigenvalue of `F_u(u, λ)`.
pub fn eigenvalue_gap<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    x: &GRState,
) -> Result<f64> {
    let jac = sys.jacobian(&x.u, x.lambda, th);
    let target = Complex64::new(0.0, x.mu);
    // shift slightly off the eigenvalue so the shifted matrix stays regular
    let shift = target + Complex64::new(1e-3 * (1.0 + x.mu.abs()), 0.0);
    let pairs = eig_near_shift(&jac, shift, 1)?;
    let nearest = pairs.first().ok_or(Error::EigenNoConvergence { converged: 0 })?;
    Ok((nearest.value - target).norm())
}

/// Damped Newton on the extended system starting from a normalized guess.
pub fn solve_hopf<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    guess: &GRState,
    c: &[f64],
    opts: HopfOptions,
) -> Result<HopfPoint> {
    let n = sys.dim();
    guess.check(n)?;
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let mut x = guess.clone();
    if x.mu < 0.0 {
        x.mu = -x.mu;
        x.v.iter_mut().for_each(|a| *a = -*a);
    }
    let mut flipped = false;
    let mut g = gr_residual(sys, th, &x, c)?;
    let mut res = norm2(&g);
    let mut iterations = 0;
    // one full step is always taken so warm starts inside the tolerance
    // still track small parameter changes
    while res > opts.tol || iterations == 0 {
        let polish = res <= opts.tol;
        if iterations == opts.maxit {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let lu = ExtendedLu::factor(&gr_jacobian(sys, th, &x, c)?)?;
        let d = lu.solve(&g)?;
        if d.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonRegularHopf);
        }
        let flat = x.flatten();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = flat.iter().zip(&d).map(|(a, b)| a - t * b).collect();
            let trial = GRState::from_flat(&trial)?;
            let tr = gr_residual(sys, th, &trial, c).map(|r| (norm2(&r), r));
            if polish {
                if let Ok((r, gt)) = tr {
                    if r <= res {
                        x = trial;
                        g = gt;
                        res = r;
                    }
                }
                break;
            }
            match tr {
                Ok((r, gt)) if r < res || t <= crate::steady::DAMPING_FLOOR => {
                    if !r.is_finite() {
                        return Err(Error::NonFinite("extended residual"));
                    }
                    x = trial;
                    g = gt;
                    res = r;
                    break;
                }
                Err(e) if t <= crate::steady::DAMPING_FLOOR => return Err(e),
                _ => t *= 0.5,
            }
        }
        if x.mu <= 0.0 {
            if flipped {
                return Err(Error::FrequencySignFlip);
            }
            flipped = true;
            x.mu = -x.mu;
            x.v.iter_mut().for_each(|a| *a = -*a);
            g = gr_residual(sys, th, &x, c)?;
            res = norm2(&g);
        }
    }
    let eig_gap = if opts.verify {
        let gap = eigenvalue_gap(sys, th, &x)?;
        if gap > eig_gap_tolerance(x.mu) {
            return Err(Error::EigenGap { gap });
        }
        gap
    } else {
        f64::NAN
    };
    Ok(HopfPoint {
        state: x,
        residual: res,
        eig_gap,
        iterations,
    })
}

/// Settings for [`locate_hopf`].
#[derive(Debug, Clone, Copy)]
pub struct LocateOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    pub k_eigs: usize,
    pub newton: NewtonOptions,
    pub hopf: HopfOptions,
}

impl LocateOptions {
    pub fn new(lambda_min: f64, lambda_max: f64, steps: usize) -> Self {
        Self {
            lambda_min,
            lambda_max,
            steps,
            k_eigs: DEFAULT_K_EIGS,
            newton: NewtonOptions::default(),
            hopf: HopfOptions::default(),
        }
    }
}

/// Continuation, guess selection, normalization and the extended solve in
/// one call.
pub fn locate_hopf<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    u0: &[f64],
    c: &[f64],
    opts: &LocateOptions,
) -> Result<(ContinuationTrace, HopfGuess, HopfPoint)> {
    let trace = continue_branch(
        sys,
        u0,
        opts.lambda_min,
        opts.lambda_max,
        opts.steps,
        opts.k_eigs,
        th,
        opts.newton,
    )?;
    let guess = build_hopf_guess(sys, th, &trace, opts.k_eigs, opts.newton)?;
    let start = state_from_guess(sys, &guess, c)?;
    let hp = solve_hopf(sys, th, &start, c, opts.hopf)?;
    Ok((trace, guess, hp))
}
