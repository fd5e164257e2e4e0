//! Moving a Hopf point with a trust-region method over one model parameter.
//!
//! The gradient of the objective is obtained from the sensitivity of the
//! extended system: with `G(X, θ) = 0` the Griewank–Reddien equations,
//! `G_X s = −G_θ` gives `dX/dθ = s`, and the objective only reads the `λ` or
//! `μ` entry of `X`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hopf::{solve_hopf, ExtendedLu, gr_jacobian, HopfOptions, HopfPoint};
use crate::system::{Controls, DynamicalSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// `(λ − λ*)² / λ*²`
    Location,
    /// `(μ − μ*)² / μ*²`
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub target: f64,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, target: f64) -> Result<Self> {
        if target == 0.0 || !target.is_finite() {
            return Err(Error::InvalidArgument("objective target must be finite and nonzero"));
        }
        Ok(Self { kind, target })
    }

    pub fn location(target: f64) -> Result<Self> {
        Self::new(ObjectiveKind::Location, target)
    }

    pub fn frequency(target: f64) -> Result<Self> {
        Self::new(ObjectiveKind::Frequency, target)
    }

    fn quantity(&self, lambda: f64, mu: f64) -> f64 {
        match self.kind {
            ObjectiveKind::Location => lambda,
            ObjectiveKind::Frequency => mu,
        }
    }

    pub fn value(&self, lambda: f64, mu: f64) -> f64 {
        let d = self.quantity(lambda, mu) - self.target;
        d * d / (self.target * self.target)
    }

    /// Derivative of [`Objective::value`] with respect to the observed quantity.
    fn slope(&self, lambda: f64, mu: f64) -> f64 {
        2.0 * (self.quantity(lambda, mu) - self.target) / (self.target * self.target)
    }
}

pub fn evaluate_objective(obj: &Objective, hp: &HopfPoint) -> f64 {
    obj.value(hp.lambda(), hp.mu())
}

/// `dX/dθ` for the flattened extended state `X = (u, v, w, λ, μ)`.
pub fn sensitivity<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    hp: &HopfPoint,
    name: &str,
    c: &[f64],
) -> Result<Vec<f64>> {
    let x = &hp.state;
    let n = sys.dim();
    let mut g_theta = Vec::with_capacity(3 * n + 2);
    g_theta.extend(sys.d_control(&x.u, x.lambda, th, name)?);
    g_theta.extend(sys.d_control_u_action(&x.u, x.lambda, th, name, &x.v)?);
    g_theta.extend(sys.d_control_u_action(&x.u, x.lambda, th, name, &x.w)?);
    g_theta.push(0.0);
    g_theta.push(0.0);
    let lu = ExtendedLu::factor(&gr_jacobian(sys, th, x, c)?)?;
    let mut s = lu.solve(&g_theta)?;
    s.iter_mut().for_each(|a| *a = -*a);
    Ok(s)
}

/// `dJ/dθ` at a converged Hopf point.
pub fn reduced_gradient<S: DynamicalSystem + ?Sized>(
    sys: &S,
    th: &Controls,
    hp: &HopfPoint,
    name: &str,
    obj: &Objective,
    c: &[f64],
) -> Result<f64> {
    let s = sensitivity(sys, th, hp, name, c)?;
    let n = sys.dim();
    let dq = match obj.kind {
        ObjectiveKind::Location => s[3 * n],
        ObjectiveKind::Frequency => s[3 * n + 1],
    };
    Ok(obj.slope(hp.lambda(), hp.mu()) * dq)
}

/// Everything the optimizer needs besides the starting Hopf point.
#[derive(Debug, Clone)]
pub struct ControlProblem<'a, S: ?Sized> {
    pub sys: &'a S,
    /// Fixed controls; the optimized one is overwritten on every trial.
    pub controls: Controls,
    pub control: String,
    pub objective: Objective,
    pub bounds: (f64, f64),
    pub normalization: Vec<f64>,
    pub eps_j: f64,
    pub g_tol: f64,
    /// Number of trial steps, accepted or not.
    pub max_iter: usize,
    /// Initial trust radius; `0.1 (1 + |θ₀|)` when `None`.
    pub delta0: Option<f64>,
    /// Largest trust radius; `10 Δ₀` when `None`.
    pub delta_max: Option<f64>,
    pub eta: f64,
    /// Branch-guard constant `C` in `‖u⁺ − u‖ ≤ C ‖u⁺‖`.
    pub branch_c: f64,
    pub hopf: HopfOptions,
}

impl<'a, S: DynamicalSystem + ?Sized> ControlProblem<'a, S> {
    pub fn new(sys: &'a S, control: &str, objective: Objective) -> Self {
        Self {
            sys,
            controls: Controls::new(),
            control: control.into(),
            objective,
            bounds: (f64::NEG_INFINITY, f64::INFINITY),
            normalization: sys.normalization(),
            eps_j: 1e-10,
            g_tol: 1e-8,
            max_iter: 100,
            delta0: None,
            delta_max: None,
            eta: 0.1,
            branch_c: 0.5,
            hopf: HopfOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.sys.control_names().contains(&self.control.as_str()) {
            return Err(Error::UnknownControl(self.control.clone()));
        }
        self.sys.check_controls(&self.controls)?;
        if !(self.eta > 0.0 && self.eta < 0.25) {
            return Err(Error::InvalidArgument("eta must lie in (0, 0.25)"));
        }
        if !(self.branch_c > 0.0) {
            return Err(Error::InvalidArgument("branch-guard constant must be positive"));
        }
        if let Some(d) = self.delta0 {
            if !(d > 0.0) {
                return Err(Error::InvalidArgument("initial trust radius must be positive"));
            }
        }
        if !(self.bounds.0 < self.bounds.1) {
            return Err(Error::InvalidArgument("empty control bounds"));
        }
        Ok(())
    }

    /// Current value of the optimized control.
    pub fn theta0(&self) -> f64 {
        let defaults = self.sys.default_controls();
        self.controls
            .get(&self.control)
            .or_else(|| defaults.get(&self.control))
            .unwrap_or(0.0)
    }
}

/// One trial of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub iter: usize,
    pub accepted: bool,
    pub theta: f64,
    /// NaN when the trial solve failed.
    pub j: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Trust radius in effect for this trial.
    pub radius: f64,
}

#[derive(Debug, Clone, Default)]
pub struct OptimizationLog {
    pub entries: Vec<LogEntry>,
}

impl OptimizationLog {
    pub fn accepted(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| e.accepted)
    }

    /// Accepted steps, not counting the initial point.
    pub fn accepted_steps(&self) -> usize {
        self.accepted().filter(|e| e.iter > 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Objective,
    Gradient,
    MaxIter,
    /// The step was cut to zero by a bound.
    Bound,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub theta: f64,
    pub hopf: HopfPoint,
    pub j: f64,
    pub gradient: f64,
    pub log: OptimizationLog,
    pub termination: Termination,
}

/// Smallest trust radius before the run is declared stalled.
pub const MIN_RADIUS: f64 = 1e-12;
/// Norm below which the branch guard is not applied.
pub const GUARD_SKIP_NORM: f64 = 1e-10;

/// Trust-region loop on `θ ↦ J(X(θ))`, starting from the Hopf point `start`
/// computed at the problem's current controls.
pub fn optimize_hopf<S: DynamicalSystem + ?Sized>(
    problem: &ControlProblem<'_, S>,
    start: &HopfPoint,
) -> Result<OptimizationResult> {
    problem.validate()?;
    let sys = problem.sys;
    let name = problem.control.as_str();
    let obj = &problem.objective;
    let c = &problem.normalization;

    let mut theta = problem.theta0();
    let mut th = problem.controls.clone().with(name, theta);
    let mut hp = start.clone();
    let mut j = evaluate_objective(obj, &hp);
    let mut g = reduced_gradient(sys, &th, &hp, name, obj, c)?;

    let delta0 = problem.delta0.unwrap_or(0.1 * (1.0 + theta.abs()));
    let delta_max = problem.delta_max.unwrap_or(10.0 * delta0);
    let mut delta = delta0;
    let mut curvature = if g != 0.0 { g.abs() / delta0 } else { 1.0 };

    let mut log = OptimizationLog::default();
    log.entries.push(LogEntry {
        iter: 0,
        accepted: true,
        theta,
        j,
        lambda: hp.lambda(),
        mu: hp.mu(),
        radius: delta,
    });

    let mut termination = Termination::MaxIter;
    for iter in 1..=problem.max_iter {
        if j <= problem.eps_j {
            termination = Termination::Objective;
            break;
        }
        if g.abs() <= problem.g_tol {
            termination = Termination::Gradient;
            break;
        }
        if delta < MIN_RADIUS {
            return Err(Error::OptimizationStalled { radius: delta });
        }

        // one-dimensional dogleg: Newton step on the secant model, clipped
        let step = if curvature > 0.0 {
            (-g / curvature).clamp(-delta, delta)
        } else {
            -g.signum() * delta
        };
        let trial_theta = (theta + step).clamp(problem.bounds.0, problem.bounds.1);
        let p = trial_theta - theta;
        if p == 0.0 {
            termination = Termination::Bound;
            break;
        }
        let predicted = -(g * p + 0.5 * curvature * p * p);

        let trial_th = th.clone().with(name, trial_theta);
        let outcome = solve_hopf(sys, &trial_th, &hp.state, c, problem.hopf);
        let mut entry = LogEntry {
            iter,
            accepted: false,
            theta: trial_theta,
            j: f64::NAN,
            lambda: f64::NAN,
            mu: f64::NAN,
            radius: delta,
        };
        let trial = match outcome {
            Ok(t) => t,
            Err(_) => {
                log.entries.push(entry);
                delta = 0.5 * p.abs();
                continue;
            }
        };
        let j_new = evaluate_objective(obj, &trial);
        entry.j = j_new;
        entry.lambda = trial.lambda();
        entry.mu = trial.mu();

        let u_new = &trial.state.u;
        let norm_new = sys.norm(u_new);
        let jump: Vec<f64> = u_new.iter().zip(&hp.state.u).map(|(a, b)| a - b).collect();
        let guard_ok = norm_new < GUARD_SKIP_NORM || sys.norm(&jump) <= problem.branch_c * norm_new;
        let rho = if predicted > 0.0 {
            (j - j_new) / predicted
        } else {
            f64::NEG_INFINITY
        };
        if !guard_ok || !(rho >= problem.eta) || !(j_new < j) {
            log.entries.push(entry);
            delta = 0.5 * p.abs();
            continue;
        }
        let g_new = match reduced_gradient(sys, &trial_th, &trial, name, obj, c) {
            Ok(v) => v,
            Err(_) => {
                log.entries.push(entry);
                delta = 0.5 * p.abs();
                continue;
            }
        };
        entry.accepted = true;
        log.entries.push(entry);

        let y = g_new - g;
        if p * y > 0.0 {
            curvature = y / p;
        }
        if rho > 0.75 && p.abs() >= 0.99 * delta {
            delta = (2.0 * delta).min(delta_max);
        } else if rho < 0.25 {
            delta *= 0.5;
        }
        theta = trial_theta;
        th = trial_th;
        hp = trial;
        j = j_new;
        g = g_new;
    }
    if termination == Termination::MaxIter {
        if j <= problem.eps_j {
            termination = Termination::Objective;
        } else if g.abs() <= problem.g_tol {
            termination = Termination::Gradient;
        }
    }
    Ok(OptimizationResult {
        theta,
        hopf: hp,
        j,
        gradient: g,
        log,
        termination,
    })
}
