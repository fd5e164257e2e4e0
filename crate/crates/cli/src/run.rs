//! Executes one configured task and writes its artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hopfctl_core::control::{optimize_hopf, ControlProblem, Objective, OptimizationResult, Termination};
use hopfctl_core::hopf::{solve_hopf, state_from_guess, HopfOptions, HopfPoint};
use hopfctl_core::models::{Brusselator, BrusselatorParams, Cgl1d, Cgl2d, CglParams, Fhn, FhnParams};
use hopfctl_core::stability::{build_hopf_guess, hopf_brackets};
use hopfctl_core::steady::{continue_branch, ContinuationTrace, NewtonOptions};
use hopfctl_core::timeint::{estimate_period, perturbed, rk45, Rk45Options};
use hopfctl_core::{Controls, DynamicalSystem, Error};
use serde_json::{json, Map, Value};

use crate::config::{Mode, ModelConfig, RunConfig};
use crate::output::{self, jnum};

/// Version of the artifact layout.
pub const ARTIFACT_VERSION: &str = "1";

/// Result of a completed run. IO failures are reported separately.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub failed: bool,
    pub error: Option<String>,
    pub summary: Value,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

pub fn build_system(model: &ModelConfig) -> Box<dyn DynamicalSystem> {
    match *model {
        ModelConfig::Fhn { a, b, c1, c2, c3 } => Box::new(Fhn::new(FhnParams { a, b, c1, c2, c3 })),
        ModelConfig::Brusselator { a } => Box::new(Brusselator::new(BrusselatorParams { a })),
        ModelConfig::Cgl2d {
            mu_cgl,
            nu,
            c3,
            c5,
            nx,
            ny,
            l1,
            l2,
        } => Box::new(Cgl2d::with_grid(CglParams { mu_cgl, nu, c3, c5 }, nx, ny, l1, l2)),
        ModelConfig::Cgl1d {
            mu_cgl,
            nu,
            c3,
            c5,
            n,
            l,
        } => Box::new(Cgl1d::with_grid(CglParams { mu_cgl, nu, c3, c5 }, n, l)),
    }
}

/// Steady state at `lambda` used to start continuation and simulation.
pub fn initial_state(model: &ModelConfig, dim: usize, lambda: f64) -> Vec<f64> {
    match *model {
        ModelConfig::Brusselator { a } => Brusselator::new(BrusselatorParams { a }).steady_state(a, lambda),
        _ => vec![0.0; dim],
    }
}

fn grid_meta(model: &ModelConfig) -> Value {
    match *model {
        ModelConfig::Cgl2d { nx, ny, l1, l2, .. } => json!({
            "dimension": 2,
            "nx": nx,
            "ny": ny,
            "hx": jnum(2.0 * std::f64::consts::PI * l1 / (nx as f64 + 1.0)),
            "hy": jnum(2.0 * std::f64::consts::PI * l2 / (ny as f64 + 1.0)),
        }),
        ModelConfig::Cgl1d { n, l, .. } => json!({
            "dimension": 1,
            "n": n,
            "h": jnum(2.0 * std::f64::consts::PI * l / (n as f64 + 1.0)),
        }),
        _ => Value::Null,
    }
}

fn inner_product_meta(model: &ModelConfig, sys: &dyn DynamicalSystem) -> Value {
    match model {
        ModelConfig::Fhn { .. } | ModelConfig::Brusselator { .. } => json!({ "kind": "euclidean" }),
        _ => {
            let mut e0 = vec![0.0; sys.dim()];
            e0[0] = 1.0;
            json!({ "kind": "quadrature", "weight": jnum(sys.inner_product(&e0, &e0)) })
        }
    }
}

fn controls_json(th: &Controls) -> Value {
    Value::Object(th.iter().map(|(k, v)| (k.to_string(), jnum(v))).collect())
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    sys: &'a dyn DynamicalSystem,
    dir: &'a Path,
    verbose: bool,
    artifacts: Vec<String>,
    results: Map<String, Value>,
}

impl Ctx<'_> {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("hopfctl: {}", msg.as_ref());
        }
    }

    fn csv(&mut self, name: &str, text: &str) -> io::Result<()> {
        if self.cfg.output.csv {
            output::write_text(self.dir, name, text)?;
            self.artifacts.push(name.into());
        }
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> io::Result<()> {
        if self.cfg.output.json {
            output::write_json(self.dir, name, value)?;
            self.artifacts.push(name.into());
        }
        Ok(())
    }

    fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.cfg.task.newton_tol,
            maxit: self.cfg.task.newton_maxit,
        }
    }

    fn hopf_options(&self) -> HopfOptions {
        HopfOptions {
            tol: self.cfg.task.hopf_tol,
            maxit: self.cfg.task.hopf_maxit,
            verify: true,
        }
    }

    /// Continuation over the configured range; always writes `trace.csv`.
    fn trace(&mut self) -> io::Result<Result<ContinuationTrace, Error>> {
        let t = &self.cfg.task;
        let (lo, hi) = (t.lambda_min.unwrap_or(0.0), t.lambda_max.unwrap_or(1.0));
        let u0 = initial_state(&self.cfg.model, self.sys.dim(), lo);
        self.log(format!("continuation in {} over [{lo}, {hi}] with {} steps", self.sys.lambda_name(), t.steps));
        let started = Instant::now();
        let trace = match continue_branch(self.sys, &u0, lo, hi, t.steps, t.k_eigs, &Controls::new(), self.newton()) {
            Ok(tr) => tr,
            Err(e) => return Ok(Err(e)),
        };
        self.log(format!("{} branch points in {:.3} s", trace.len(), started.elapsed().as_secs_f64()));
        self.csv("trace.csv", &output::trace_csv(self.sys, &trace, t.k_eigs))?;
        let brackets: Vec<Value> = hopf_brackets(&trace)
            .iter()
            .map(|b| {
                json!({
                    "lambda_left": jnum(trace.points[b.index].lambda),
                    "lambda_right": jnum(trace.points[b.index + 1].lambda),
                })
            })
            .collect();
        self.results.insert("branch_points".into(), json!(trace.len()));
        self.results.insert("brackets".into(), Value::Array(brackets));
        if let Some((lambda, e)) = &trace.failure {
            self.results.insert("truncated_at".into(), jnum(*lambda));
            self.log(format!("continuation stopped at {lambda}: {e}"));
        }
        Ok(Ok(trace))
    }

    fn hopf_from_trace(&self, trace: &ContinuationTrace) -> Result<HopfPoint, Error> {
        let th = Controls::new();
        let c = self.sys.normalization();
        let guess = build_hopf_guess(self.sys, &th, trace, self.cfg.task.k_eigs, self.newton())?;
        self.log(format!("Hopf guess at {} = {}, mu = {}", self.sys.lambda_name(), guess.lambda, guess.mu));
        let start = state_from_guess(self.sys, &guess, &c)?;
        solve_hopf(self.sys, &th, &start, &c, self.hopf_options())
    }

    fn record_hopf(&mut self, hp: &HopfPoint) -> io::Result<()> {
        self.log(format!(
            "Hopf point: {} = {}, mu = {}, residual = {:e}",
            self.sys.lambda_name(),
            hp.lambda(),
            hp.mu(),
            hp.residual
        ));
        let value = output::hopf_json(self.sys, hp);
        self.json("hopf.json", &value)?;
        self.results.insert(
            "hopf".into(),
            json!({
                "lambda": value["lambda"],
                "mu": value["mu"],
                "period": value["period"],
                "residual": value["residual"],
                "eig_gap": value["eig_gap"],
                "iterations": hp.iterations,
            }),
        );
        Ok(())
    }

    /// Runs the locate pipeline. A truncated continuation is a failure even
    /// when a Hopf point was found before the break.
    fn locate(&mut self) -> io::Result<Result<HopfPoint, String>> {
        let trace = match self.trace()? {
            Ok(tr) => tr,
            Err(e) => return Ok(Err(format!("continuation failed: {e}"))),
        };
        let hp = match self.hopf_from_trace(&trace) {
            Ok(hp) => hp,
            Err(e) => return Ok(Err(format!("Hopf solve failed: {e}"))),
        };
        self.record_hopf(&hp)?;
        if let Some((lambda, e)) = &trace.failure {
            return Ok(Err(format!("continuation truncated at {lambda}: {e}")));
        }
        Ok(Ok(hp))
    }

    fn control(&mut self) -> io::Result<Result<(), String>> {
        let hp = match self.locate()? {
            Ok(hp) => hp,
            Err(e) => return Ok(Err(e)),
        };
        let t = &self.cfg.task;
        let objective = Objective::new(t.objective.expect("validated").into(), t.target.expect("validated"))
            .map_err(|e| e.to_string());
        let objective = match objective {
            Ok(o) => o,
            Err(e) => return Ok(Err(e)),
        };
        let name = t.control.clone().expect("validated");
        let mut problem = ControlProblem::new(self.sys, &name, objective);
        problem.eps_j = t.eps_j;
        problem.g_tol = t.g_tol;
        problem.max_iter = t.max_iter;
        problem.delta0 = t.delta0;
        problem.delta_max = t.delta_max;
        problem.eta = t.eta;
        problem.branch_c = t.branch_c;
        problem.bounds = (
            t.bound_min.unwrap_or(f64::NEG_INFINITY),
            t.bound_max.unwrap_or(f64::INFINITY),
        );
        problem.hopf = self.hopf_options();
        self.log(format!("optimizing {name} from {}", problem.theta0()));
        let started = Instant::now();
        let res = match optimize_hopf(&problem, &hp) {
            Ok(r) => r,
            Err(e) => return Ok(Err(format!("optimization failed: {e}"))),
        };
        self.log(format!(
            "{name} = {} after {} accepted steps ({:.3} s)",
            res.theta,
            res.log.accepted_steps(),
            started.elapsed().as_secs_f64()
        ));
        self.csv("optlog.csv", &output::optlog_csv(&res.log))?;
        self.record_hopf(&res.hopf)?;
        self.results.insert("control".into(), control_json(&name, &res));
        if res.termination == Termination::MaxIter {
            return Ok(Err(format!("optimizer reached max_iter = {}", t.max_iter)));
        }
        Ok(Ok(()))
    }

    fn simulate(&mut self) -> io::Result<Result<(), String>> {
        let t = &self.cfg.task;
        let lambda = t.lambda.expect("validated");
        let dim = self.sys.dim();
        if t.component >= dim {
            return Ok(Err(format!("component {} out of range for dimension {dim}", t.component)));
        }
        let u0 = perturbed(&initial_state(&self.cfg.model, dim, lambda), t.component, t.perturbation);
        let opts = Rk45Options {
            rtol: t.rtol,
            atol: t.atol,
            sample_dt: Some(t.sample_dt),
            ..Default::default()
        };
        self.log(format!("integrating to t = {} at {} = {lambda}", t.t_end, self.sys.lambda_name()));
        let traj = match rk45(self.sys, &u0, lambda, &Controls::new(), (0.0, t.t_end), opts) {
            Ok(tr) => tr,
            Err(e) => return Ok(Err(format!("integration failed: {e}"))),
        };
        self.csv("trajectory.csv", &output::trajectory_csv(&traj))?;
        let period = match estimate_period(&traj, t.component, t.transient) {
            Ok(p) => json!({
                "period": jnum(p.period),
                "std_dev": jnum(p.std_dev),
                "crossings": p.crossings,
            }),
            Err(_) => Value::Null,
        };
        self.results.insert("steps".into(), json!(traj.steps.len()));
        self.results.insert("rejected".into(), json!(traj.rejected));
        self.results.insert("period".into(), period);
        Ok(Ok(()))
    }
}

fn control_json(name: &str, res: &OptimizationResult) -> Value {
    json!({
        "name": name,
        "value": jnum(res.theta),
        "J": jnum(res.j),
        "gradient": jnum(res.gradient),
        "accepted_steps": res.log.accepted_steps(),
        "trials": res.log.entries.len().saturating_sub(1),
        "termination": format!("{:?}", res.termination).to_lowercase(),
    })
}

/// Runs `cfg`, writing artifacts into `dir` (created if needed).
pub fn run(cfg: &RunConfig, dir: &Path, verbose: bool) -> io::Result<RunReport> {
    fs::create_dir_all(dir)?;
    let sys = build_system(&cfg.model);
    let mut ctx = Ctx {
        cfg,
        sys: sys.as_ref(),
        dir,
        verbose,
        artifacts: Vec::new(),
        results: Map::new(),
    };
    let outcome = match cfg.task.mode {
        Mode::Continue => ctx.trace()?.map_err(|e| format!("continuation failed: {e}")).and_then(|tr| {
            match tr.failure {
                Some((lambda, e)) => Err(format!("continuation truncated at {lambda}: {e}")),
                None => Ok(()),
            }
        }),
        Mode::Locate => ctx.locate()?.map(|_| ()),
        Mode::Control => ctx.control()?,
        Mode::Simulate => ctx.simulate()?,
    };
    let error = outcome.err();
    if let Some(e) = &error {
        ctx.log(e);
    }
    let mut artifacts = ctx.artifacts;
    artifacts.push("summary.json".into());
    let summary = json!({
        "version": ARTIFACT_VERSION,
        "hopfctl": env!("CARGO_PKG_VERSION"),
        "failed": error.is_some(),
        "error": error,
        "config": cfg,
        "lambda_name": sys.lambda_name(),
        "controls": controls_json(&sys.default_controls()),
        "inner_product": inner_product_meta(&cfg.model, sys.as_ref()),
        "grid": grid_meta(&cfg.model),
        "results": Value::Object(ctx.results),
        "artifacts": artifacts,
    });
    output::write_json(dir, "summary.json", &summary)?;
    Ok(RunReport {
        failed: error.is_some(),
        error,
        summary,
        artifacts,
    })
}

/// Output directory: command line, then config, then environment, then
/// `hopfctl-out`.
pub fn resolve_out_dir(cli: Option<PathBuf>, cfg: &RunConfig, env: Option<PathBuf>) -> PathBuf {
    cli.or_else(|| cfg.output.dir.clone())
        .or(env)
        .unwrap_or_else(|| PathBuf::from("hopfctl-out"))
}
