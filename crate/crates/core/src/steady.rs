//! Steady states: damped Newton, natural-parameter continuation and a
//! minimal deflation operator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{norm2, BandLu, EigenPair};
use crate::stability::leading_spectrum;
use crate::system::{Controls, DynamicalSystem};

/// Smallest damping factor tried by the backtracking line search.
pub const DAMPING_FLOOR: f64 = 1e-4;

/// Eigenvalues recorded per continuation step unless told otherwise.
pub const DEFAULT_K_EIGS: usize = 6;

fn newton_direction(jac: &crate::linalg::SparseMatrix, f: &[f64]) -> Result<Vec<f64>> {
    let lu = BandLu::factor(jac, 0.0, 0)?;
    let mut d = lu.solve(f)?;
    for x in &mut d {
        *x = -*x;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("newton step"));
    }
    Ok(d)
}

/// Halves `t` from 1 until `merit(u + t d)` drops below `current` or `t`
/// reaches [`DAMPING_FLOOR`]; returns the new point and its merit.
fn backtrack(
    u: &[f64],
    d: &[f64],
    current: f64,
    mut merit: impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut t = 1.0;
    loop {
        let trial: Vec<f64> = u.iter().zip(d).map(|(a, b)| a + t * b).collect();
        let m = merit(&trial);
        if (m.is_finite() && m < current) || t <= DAMPING_FLOOR {
            return (trial, m);
        }
        t *= 0.5;
    }
}

/// Solves `F(u, λ) = 0` by Newton's method with halving line search on the
/// Euclidean residual norm.
pub fn newton_steady<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u0: &[f64],
    lambda: f64,
    th: &Controls,
    tol: f64,
    maxit: usize,
) -> Result<Vec<f64>> {
    if u0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: u0.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let mut u = u0.to_vec();
    let mut f = sys.residual(&u, lambda, th);
    let mut res = norm2(&f);
    for _ in 0..maxit {
        if !res.is_finite() {
            return Err(Error::NonFinite("residual"));
        }
        if res <= tol {
            return Ok(u);
        }
        let d = newton_direction(&sys.jacobian(&u, lambda, th), &f)?;
        let (next, r) = backtrack(&u, &d, res, |x| norm2(&sys.residual(x, lambda, th)));
        u = next;
        res = r;
        f = sys.residual(&u, lambda, th);
    }
    if res <= tol {
        return Ok(u);
    }
    Err(Error::NoConvergence {
        iterations: maxit,
        residual: res,
    })
}

/// One continuation record.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub u: Vec<f64>,
    /// Leading eigenpairs, sorted by `|Re|` ascending.
    pub eigs: Vec<EigenPair>,
    /// Largest real part among the recorded eigenvalues.
    pub growth: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuationTrace {
    pub points: Vec<BranchPoint>,
    /// Parameter value and error of the step that stopped the run early.
    pub failure: Option<(f64, Error)>,
}

impl ContinuationTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Settings shared by the continuation and deflation drivers.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub maxit: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            maxit: 50,
        }
    }
}

/// Natural-parameter continuation on the uniform grid of `steps` values from
/// `lambda_start` to `lambda_end` (both included), recording the `k_eigs`
/// eigenvalues of `F_u` nearest the imaginary axis at each point.
#[allow(clippy::too_many_arguments)]
pub fn continue_branch<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u0: &[f64],
    lambda_start: f64,
    lambda_end: f64,
    steps: usize,
    k_eigs: usize,
    th: &Controls,
    opts: NewtonOptions,
) -> Result<ContinuationTrace> {
    if steps < 2 {
        return Err(Error::InvalidArgument("continuation needs at least 2 steps"));
    }
    if lambda_start == lambda_end || !lambda_start.is_finite() || !lambda_end.is_finite() {
        return Err(Error::InvalidArgument("continuation range must be finite and non-empty"));
    }
    let mut points = Vec::with_capacity(steps);
    let mut u = u0.to_vec();
    let dl = (lambda_end - lambda_start) / (steps - 1) as f64;
    for i in 0..steps {
        let lambda = if i + 1 == steps {
            lambda_end
        } else {
            lambda_start + i as f64 * dl
        };
        let step = newton_steady(sys, &u, lambda, th, opts.tol, opts.maxit).and_then(|us| {
            let report = leading_spectrum(sys, &us, lambda, th, k_eigs)?;
            Ok((us, report))
        });
        match step {
            Ok((us, report)) => {
                let growth = report
                    .pairs
                    .iter()
                    .map(|p| p.value.re)
                    .fold(f64::NEG_INFINITY, f64::max);
                u = us.clone();
                points.push(BranchPoint {
                    lambda,
                    u: us,
                    eigs: report.pairs,
                    growth,
                });
            }
            Err(e) => {
                if i == 0 {
                    return Err(e);
                }
                return Ok(ContinuationTrace {
                    points,
                    failure: Some((lambda, e)),
                });
            }
        }
    }
    Ok(ContinuationTrace {
        points,
        failure: None,
    })
}

/// Shift of the deflation operator.
pub const DEFLATION_SHIFT: f64 = 1.0;
/// Power of the deflation operator.
pub const DEFLATION_POWER: i32 = 2;

/// Squared distance below which a point counts as a known solution.
const KNOWN_RADIUS_SQ: f64 = 1e-6;
/// Distance below which a converged point is rejected as a rediscovery.
const MIN_SEPARATION: f64 = 1e-3;

/// Newton on `M(u) F(u, λ)` with `M(u) = ∏ (σ + 1/‖u − uᵢ‖^p)`, which steers
/// the iteration away from the `known` roots.
pub fn deflated_solve<S: DynamicalSystem + ?Sized>(
    sys: &S,
    known: &[Vec<f64>],
    u0: &[f64],
    lambda: f64,
    th: &Controls,
    opts: NewtonOptions,
) -> Result<Vec<f64>> {
    let n = sys.dim();
    if u0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u0.len(),
        });
    }
    for k in known {
        if k.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k.len(),
            });
        }
    }
    let dist_sq = |u: &[f64], k: &[f64]| {
        let d: Vec<f64> = u.iter().zip(k).map(|(a, b)| a - b).collect();
        sys.inner_product(&d, &d)
    };
    let near_known = |u: &[f64]| known.iter().position(|k| dist_sq(u, k) <= KNOWN_RADIUS_SQ);
    let factors = |u: &[f64]| -> Vec<f64> {
        known
            .iter()
            .map(|k| DEFLATION_SHIFT + 1.0 / libm::pow(dist_sq(u, k), DEFLATION_POWER as f64 / 2.0))
            .collect()
    };
    let deflated_norm = |u: &[f64]| {
        let m: f64 = factors(u).iter().product();
        m * norm2(&sys.residual(u, lambda, th))
    };

    if let Some(i) = near_known(u0) {
        return Err(Error::ConvergedToKnown { index: i });
    }
    let mut u = u0.to_vec();
    for _ in 0..opts.maxit {
        let f = sys.residual(&u, lambda, th);
        let res = norm2(&f);
        if !res.is_finite() {
            return Err(Error::NonFinite("residual"));
        }
        if res <= opts.tol {
            break;
        }
        let d0 = newton_direction(&sys.jacobian(&u, lambda, th), &f)?;
        // Sherman–Morrison on (M F_u + F ∇Mᵀ): the deflated step is a
        // rescaling of the plain Newton step.
        let mut gd = 0.0;
        for (k, m_i) in known.iter().zip(factors(&u)) {
            let diff: Vec<f64> = u.iter().zip(k).map(|(a, b)| a - b).collect();
            let r2 = sys.inner_product(&diff, &diff);
            let p = DEFLATION_POWER as f64;
            let dm = -p * libm::pow(r2, -p / 2.0 - 1.0) * sys.inner_product(&diff, &d0);
            gd += dm / m_i;
        }
        let denom = 1.0 - gd;
        let d: Vec<f64> = if denom.abs() > 1e-14 {
            d0.iter().map(|x| x / denom).collect()
        } else {
            d0
        };
        let current = deflated_norm(&u);
        let (next, _) = backtrack(&u, &d, current, &deflated_norm);
        u = next;
        if let Some(i) = near_known(&u) {
            return Err(Error::ConvergedToKnown { index: i });
        }
    }
    let res = norm2(&sys.residual(&u, lambda, th));
    if res > opts.tol {
        return Err(Error::NoConvergence {
            iterations: opts.maxit,
            residual: res,
        });
    }
    for (i, k) in known.iter().enumerate() {
        if libm::sqrt(dist_sq(&u, k)) <= MIN_SEPARATION {
            return Err(Error::ConvergedToKnown { index: i });
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Brusselator, Fhn};
    use alloc::vec;

    #[test]
    fn fhn_relaxes_to_origin() {
        let m = Fhn::default();
        let u = newton_steady(&m, &[0.2, 0.1], 0.05, &Controls::new(), 1e-12, 50).unwrap();
        assert!(u[0].abs() < 1e-10 && u[1].abs() < 1e-10);
    }

    #[test]
    fn brusselator_fixed_point() {
        let m = Brusselator::default();
        let u = newton_steady(&m, &[1.1, 1.9], 2.0, &Controls::new(), 1e-12, 50).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-10 && (u[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn too_few_steps_rejected() {
        let m = Fhn::default();
        let r = continue_branch(&m, &[0.0, 0.0], 0.03, 0.07, 1, 2, &Controls::new(), NewtonOptions::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn start_at_known_root_is_rejected() {
        let m = Fhn::default();
        let r = deflated_solve(
            &m,
            &[vec![0.0, 0.0]],
            &[0.0, 0.0],
            0.05,
            &Controls::new(),
            NewtonOptions::default(),
        );
        assert_eq!(r, Err(Error::ConvergedToKnown { index: 0 }));
    }
}
