//! Linear stability of steady states and the initial guess for the Hopf solve.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_all, eig_near_shift, eig_residual, Complex64, EigenPair, DENSE_EIG_THRESHOLD,
};
use crate::steady::{newton_steady, BranchPoint, ContinuationTrace, NewtonOptions};
use crate::system::{Controls, DynamicalSystem};

/// Eigenvalues with `|Im|` below this are treated as real.
pub const FREQUENCY_FLOOR: f64 = 1e-8;

/// Candidates with `|σ|` below this count as "on the axis" for the warning
/// about multiple critical pairs.
pub const AXIS_WARNING_BAND: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct EigenReport {
    /// Sorted by `|Re|` ascending.
    pub pairs: Vec<EigenPair>,
    /// `‖F_u φ − λ φ‖` for each pair.
    pub residuals: Vec<f64>,
    /// `‖F_u‖∞`.
    pub jacobian_norm: f64,
}

impl EigenReport {
    /// Members with positive frequency, in report order.
    pub fn candidates(&self) -> impl Iterator<Item = &EigenPair> {
        self.pairs.iter().filter(|p| p.value.im > FREQUENCY_FLOOR)
    }
}

fn sort_by_growth_magnitude(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| {
        a.value
            .re
            .abs()
            .partial_cmp(&b.value.re.abs())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                b.value
                    .im
                    .partial_cmp(&a.value.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
}

/// The `k` eigenpairs of `F_u(u, λ)` nearest the imaginary axis.
///
/// Small systems use the full dense spectrum. Larger ones take the `k`
/// eigenvalues nearest the origin by shift-invert and order those.
pub fn leading_spectrum<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u: &[f64],
    lambda: f64,
    th: &Controls,
    k: usize,
) -> Result<EigenReport> {
    let jac = sys.jacobian(u, lambda, th);
    let n = jac.rows();
    let mut pairs = if n <= DENSE_EIG_THRESHOLD {
        eig_all(&jac.to_dense())?
    } else {
        eig_near_shift(&jac, Complex64::new(0.0, 0.0), k)?
    };
    sort_by_growth_magnitude(&mut pairs);
    pairs.truncate(k.min(n));
    let residuals = pairs.iter().map(|p| eig_residual(&jac, p)).collect();
    Ok(EigenReport {
        pairs,
        residuals,
        jacobian_norm: jac.norm_inf(),
    })
}

/// Starting point `(ũ, λ̃, μ̃, v₀, w₀)` for the extended system.
#[derive(Debug, Clone)]
pub struct HopfGuess {
    pub u: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// Growth rate of the selected pair.
    pub sigma: f64,
    /// Set when more than one candidate pair lies within
    /// [`AXIS_WARNING_BAND`] of the imaginary axis.
    pub multiple_critical: bool,
}

/// A sign change of the growth rate of one tracked eigenvalue between two
/// adjacent trace records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    /// Index of the left record.
    pub index: usize,
    pub left: Complex64,
    pub right: Complex64,
}

fn nearest<'a>(
    target: Complex64,
    pool: impl Iterator<Item = &'a EigenPair>,
) -> Option<&'a EigenPair> {
    pool.min_by(|a, b| {
        (a.value - target)
            .norm()
            .partial_cmp(&(b.value - target).norm())
            .unwrap_or(core::cmp::Ordering::Equal)
    })
}

fn candidates(p: &BranchPoint) -> impl Iterator<Item = &EigenPair> {
    p.eigs.iter().filter(|e| e.value.im > FREQUENCY_FLOOR)
}

/// All growth-rate sign changes along the trace. Eigenvalues are matched
/// between neighbouring records by proximity, so two different modes that
/// happen to swap order do not produce a spurious crossing.
pub fn hopf_brackets(trace: &ContinuationTrace) -> Vec<Bracket> {
    let mut out = Vec::new();
    for (i, pair) in trace.points.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        for e in candidates(a) {
            let Some(f) = nearest(e.value, candidates(b)) else {
                continue;
            };
            // the match has to be mutual to count as the same mode
            let back = nearest(f.value, candidates(a)).map(|g| g.value);
            if back != Some(e.value) {
                continue;
            }
            let (sa, sb) = (e.value.re, f.value.re);
            if (sa < 0.0 && sb >= 0.0) || (sa > 0.0 && sb <= 0.0) {
                out.push(Bracket {
                    index: i,
                    left: e.value,
                    right: f.value,
                });
            }
        }
    }
    out
}

fn guess_from(u: &[f64], lambda: f64, pair: &EigenPair, others: &[EigenPair]) -> HopfGuess {
    let critical = others
        .iter()
        .filter(|p| p.value.im > FREQUENCY_FLOOR && p.value.re.abs() <= AXIS_WARNING_BAND)
        .count();
    HopfGuess {
        u: u.to_vec(),
        lambda,
        mu: pair.value.im,
        v: pair.vector.iter().map(|z| z.re).collect(),
        w: pair.vector.iter().map(|z| z.im).collect(),
        sigma: pair.value.re,
        multiple_critical: critical > 1,
    }
}

/// Refines a bracket by one bisection step and returns the best of the
/// left, middle and right points.
pub fn refine_bracket<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    trace: &ContinuationTrace,
    bracket: &Bracket,
    k_eigs: usize,
    opts: NewtonOptions,
) -> Result<HopfGuess> {
    let a = &trace.points[bracket.index];
    let b = &trace.points[bracket.index + 1];
    let ea = nearest(bracket.left, candidates(a)).ok_or(Error::NoHopfCandidate)?;
    let eb = nearest(bracket.right, candidates(b)).ok_or(Error::NoHopfCandidate)?;
    let mut best = guess_from(&a.u, a.lambda, ea, &a.eigs);
    if eb.value.re.abs() < best.sigma.abs() {
        best = guess_from(&b.u, b.lambda, eb, &b.eigs);
    }
    let lm = 0.5 * (a.lambda + b.lambda);
    let mid = newton_steady(sys, &a.u, lm, th, opts.tol, opts.maxit)
        .and_then(|um| Ok((leading_spectrum(sys, &um, lm, th, k_eigs)?, um)));
    if let Ok((report, um)) = mid {
        let target = (bracket.left + bracket.right) * 0.5;
        if let Some(em) = nearest(target, report.candidates()) {
            if em.value.re.abs() < best.sigma.abs() {
                best = guess_from(&um, lm, em, &report.pairs);
            }
        }
    }
    Ok(best)
}

/// Picks the Hopf candidate along `trace`: the bracketed crossing with the
/// smallest growth rate after one bisection, or failing that the candidate
/// with the smallest `|σ|` that passes the screening bound
/// `|σ| ≤ 0.5 · max |Re|` over the trace.
pub fn build_hopf_guess<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    trace: &ContinuationTrace,
    k_eigs: usize,
    opts: NewtonOptions,
) -> Result<HopfGuess> {
    if trace.points.is_empty() {
        return Err(Error::NoHopfCandidate);
    }
    let brackets = hopf_brackets(trace);
    if let Some(br) = brackets.iter().min_by(|x, y| {
        let sx = x.left.re.abs().min(x.right.re.abs());
        let sy = y.left.re.abs().min(y.right.re.abs());
        sx.partial_cmp(&sy).unwrap_or(core::cmp::Ordering::Equal)
    }) {
        return refine_bracket(sys, th, trace, br, k_eigs, opts);
    }

    let max_re = trace
        .points
        .iter()
        .flat_map(|p| p.eigs.iter())
        .fold(0.0f64, |m, e| m.max(e.value.re.abs()));
    let bound = 0.5 * max_re;
    let mut best: Option<(&BranchPoint, &EigenPair)> = None;
    for p in &trace.points {
        for e in candidates(p) {
            if e.value.re.abs() > bound {
                continue;
            }
            if best.is_none_or(|(_, b)| e.value.re.abs() < b.value.re.abs()) {
                best = Some((p, e));
            }
        }
    }
    let (p, e) = best.ok_or(Error::NoHopfCandidate)?;
    Ok(guess_from(&p.u, p.lambda, e, &p.eigs))
}
