//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use hopfctl::run::build_system;
use hopfctl::{parse_config, run, RunConfig};
use hopfctl_core::control::{evaluate_objective, reduced_gradient, Objective};
use hopfctl_core::hopf::{
    eigenvalue_gap, gr_jacobian, gr_residual, locate_hopf, solve_hopf, GRState, HopfOptions,
    HopfPoint, LocateOptions,
};
use hopfctl_core::linalg::DenseMatrix;
use hopfctl_core::models::{Brusselator, BrusselatorParams, Cgl1d, Cgl2d, CglParams, Fhn, FhnParams};
use hopfctl_core::{Controls, DynamicalSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

// Pinned tolerances.
const FHN_LAMBDA: f64 = 0.0504167;
const FHN_MU: f64 = 0.0226583;
const FHN_LOCATE_TOL: f64 = 1e-6;
const FHN_TARGET_MU: f64 = 0.0157080;
const FHN_C2: f64 = 0.025759;
const FHN_C2_TOL: f64 = 1e-5;
const J_TOL: f64 = 1e-14;
const MAX_ACCEPTED: usize = 20;
const CGL_LOCATION_REL: f64 = 0.01;
const CGL_MU_TOL: f64 = 1e-8;
const MIN_ORDER: f64 = 1.9;
const CGL_NU_TARGET: f64 = 10.0;
const CGL_NU_TOL: f64 = 1e-8;
const LENGTH_REL: f64 = 0.01;
const LENGTH_DISCRETE_TOL: f64 = 1e-8;
const PERIOD_REL: f64 = 0.03;
const FD_JACOBIAN_REL: f64 = 1e-5;
const FD_GRADIENT_REL: f64 = 1e-5;
const NORMALIZATION_TOL: f64 = 1e-10;
const EIG_GAP_TOL: f64 = 1e-6;
const BRUSSELATOR_TOL: f64 = 1e-8;
// Solver settings for the control runs: objective and gradient thresholds
// below the required J so the run does not stop before reaching it.
const CONTROL_TOLS: &str = "eps_j = 1e-20\ng_tol = 1e-14\n";

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, msg: String) {
        let line = format!("{} [{id}] {msg}", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((pass, line));
    }

    fn time(&mut self, id: &str, what: &str, took: Duration, limit: Duration) {
        self.check(
            id,
            took < limit,
            format!("{what} runtime {:.3} s < {} s", took.as_secs_f64(), limit.as_secs_f64()),
        );
    }
}

struct Run {
    cfg: RunConfig,
    dir: tempfile::TempDir,
    summary: Value,
    took: Duration,
}

impl Run {
    fn new(text: &str) -> Self {
        let cfg = parse_config(text).expect("acceptance config parses");
        let dir = tempfile::tempdir().unwrap();
        let started = Instant::now();
        let report = run(&cfg, dir.path(), false).expect("artifacts written");
        let took = started.elapsed();
        Run {
            cfg,
            dir,
            summary: report.summary,
            took,
        }
    }

    fn failed(&self) -> bool {
        self.summary["failed"].as_bool().unwrap()
    }

    fn result(&self, path: &[&str]) -> f64 {
        let mut v = &self.summary["results"];
        for p in path {
            v = &v[*p];
        }
        v.as_f64().unwrap_or(f64::NAN)
    }

    fn hopf(&self) -> Option<GRState> {
        let text = fs::read_to_string(self.dir.path().join("hopf.json")).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        let vec = |k: &str| -> Vec<f64> { v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
        Some(GRState {
            u: vec("u"),
            v: vec("v"),
            w: vec("w"),
            lambda: v["lambda"].as_f64()?,
            mu: v["mu"].as_f64()?,
        })
    }

    /// Accepted optimizer rows as `(theta, J)`.
    fn accepted(&self) -> Vec<(f64, f64)> {
        let text = fs::read_to_string(self.dir.path().join("optlog.csv")).unwrap_or_default();
        text.lines()
            .skip(1)
            .filter_map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[1] == "1").then(|| (f[2].parse().unwrap(), f[3].parse().unwrap()))
            })
            .collect()
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(lo..hi)).collect()
}

/// Normalization and eigenvalue-gap conditions of a converged point.
fn hopf_invariants(sys: &dyn DynamicalSystem, th: &Controls, x: &GRState) -> (f64, f64) {
    let c = sys.normalization();
    let norm_err = sys.inner_product(&c, &x.v).abs().max((sys.inner_product(&c, &x.w) - 1.0).abs());
    let gap = eigenvalue_gap(sys, th, x).unwrap_or(f64::INFINITY);
    (norm_err, gap)
}

/// Re-solves the extended system at each accepted control value, warm
/// started along the optimizer path, and returns the converged points.
fn replay(sys: &dyn DynamicalSystem, name: &str, start: &GRState, accepted: &[(f64, f64)]) -> Vec<(Controls, HopfPoint)> {
    let c = sys.normalization();
    let mut x = start.clone();
    let mut out = Vec::new();
    for &(theta, _) in accepted {
        let th = Controls::new().with(name, theta);
        match solve_hopf(sys, &th, &x, &c, HopfOptions::default()) {
            Ok(hp) => {
                x = hp.state.clone();
                out.push((th, hp));
            }
            Err(_) => break,
        }
    }
    out
}

fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DenseMatrix {
    let m = f(x).len();
    let mut out = DenseMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            out[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    out
}

fn norm_inf(a: &DenseMatrix) -> f64 {
    (0..a.rows()).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn diff_norm_inf(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().zip(b.row(i)).map(|(x, y)| (x - y).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Worst `‖J − J_fd‖∞ / (1 + ‖J‖∞)` of the extended Jacobian over 10 random
/// states.
fn gr_jacobian_fd(sys: &dyn DynamicalSystem, th: &Controls, lambda: (f64, f64), seed: u64) -> f64 {
    let mut r = rng(seed);
    let c = sys.normalization();
    let n = sys.dim();
    (0..10)
        .map(|_| {
            let x = GRState {
                u: uniform(&mut r, n, -1.0, 1.0),
                v: uniform(&mut r, n, -1.0, 1.0),
                w: uniform(&mut r, n, -1.0, 1.0),
                lambda: r.gen_range(lambda.0..lambda.1),
                mu: r.gen_range(0.1..2.0),
            };
            let jac = gr_jacobian(sys, th, &x, &c).unwrap().to_dense();
            let fd = fd_jacobian(
                |y| gr_residual(sys, th, &GRState::from_flat(y).unwrap(), &c).unwrap(),
                &x.flatten(),
                1e-6,
            );
            diff_norm_inf(&jac, &fd) / (1.0 + norm_inf(&jac))
        })
        .fold(0.0, f64::max)
}

/// Worst relative gap between the reduced gradient and a central difference
/// of `θ ↦ J(solve_hopf(θ))` at three random control values.
fn gradient_fd(
    sys: &dyn DynamicalSystem,
    name: &str,
    obj: Objective,
    theta_range: (f64, f64),
    seed: u64,
    window: impl Fn(f64) -> (f64, f64),
    u0: impl Fn(f64, f64) -> Vec<f64>,
) -> f64 {
    let mut r = rng(seed);
    let c = sys.normalization();
    let opts = HopfOptions::default();
    let mut worst = 0.0f64;
    for theta in uniform(&mut r, 3, theta_range.0, theta_range.1) {
        let th = Controls::new().with(name, theta);
        let (lo, hi) = window(theta);
        let hp = match locate_hopf(sys, &th, &u0(theta, lo), &c, &LocateOptions::new(lo, hi, 11)) {
            Ok((_, _, hp)) => hp,
            Err(_) => return f64::INFINITY,
        };
        let g = reduced_gradient(sys, &th, &hp, name, &obj, &c).unwrap();
        let h = 1e-5 * (1.0 + theta.abs());
        let j = |t: f64| {
            let th = Controls::new().with(name, t);
            solve_hopf(sys, &th, &hp.state, &c, opts).map_or(f64::NAN, |p| evaluate_objective(&obj, &p))
        };
        let fd = (j(theta + h) - j(theta - h)) / (2.0 * h);
        let rel = (g - fd).abs() / g.abs().max(fd.abs());
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }
    worst
}

fn fhn_locate(rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>) {
    let r = Run::new("[model]\nname = fhn\n[task]\nmode = locate\nlambda_min = 0.03\nlambda_max = 0.07\n");
    let p = FhnParams::default();
    let (lambda, mu) = (r.result(&["hopf", "lambda"]), r.result(&["hopf", "mu"]));
    let (oracle_l, oracle_mu) = (p.hopf_c1(), p.hopf_frequency(p.c2));
    let err = (lambda - FHN_LAMBDA).abs().max((mu - FHN_MU).abs());
    rep.check(
        "1",
        !r.failed() && err <= FHN_LOCATE_TOL,
        format!("FHN Hopf at c1 = {lambda:.10}, mu = {mu:.10}; max error vs ({FHN_LAMBDA}, {FHN_MU}) = {err:.2e} <= {FHN_LOCATE_TOL:e}"),
    );
    let err = (lambda - oracle_l).abs().max((mu - oracle_mu).abs());
    rep.check(
        "1",
        err <= FHN_LOCATE_TOL,
        format!("FHN Hopf vs analytic oracle ({oracle_l:.10}, {oracle_mu:.10}): error {err:.2e} <= {FHN_LOCATE_TOL:e}"),
    );
    rep.time("1", "FHN locate", r.took, Duration::from_secs(1));
    if let Some(x) = r.hopf() {
        let (n, g) = hopf_invariants(&Fhn::default(), &Controls::new(), &x);
        invariants.push(("fhn locate".into(), n, g));
    }
}

/// Returns the optimized `c2`.
fn fhn_control(rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>, monotone: &mut Vec<(String, bool)>) -> f64 {
    let r = Run::new(&format!(
        "[model]\nname = fhn\n[task]\nmode = control\nobjective = frequency\ntarget = {FHN_TARGET_MU}\ncontrol = c2\nlambda_min = 0.03\nlambda_max = 0.07\n{CONTROL_TOLS}"
    ));
    let c2 = r.result(&["control", "value"]);
    let j = r.result(&["control", "J"]);
    let steps = r.result(&["control", "accepted_steps"]);
    let oracle = FhnParams::default().c2_for_frequency(FHN_TARGET_MU);
    rep.check("2", !r.failed() && j <= J_TOL, format!("FHN control J = {j:.3e} <= {J_TOL:e}"));
    rep.check(
        "2",
        (c2 - FHN_C2).abs() <= FHN_C2_TOL,
        format!("FHN control c2 = {c2:.10} (oracle {oracle:.10}); |c2 - {FHN_C2}| = {:.2e} <= {FHN_C2_TOL:e}", (c2 - FHN_C2).abs()),
    );
    rep.check(
        "2",
        steps <= MAX_ACCEPTED as f64,
        format!("FHN control accepted steps {steps} <= {MAX_ACCEPTED}"),
    );
    rep.time("2", "FHN control", r.took, Duration::from_secs(5));
    record_control(&r, "c2", invariants, monotone);
    c2
}

/// Collects invariants of every converged point of a control run.
fn record_control(r: &Run, name: &str, invariants: &mut Vec<(String, f64, f64)>, monotone: &mut Vec<(String, bool)>) {
    let sys = build_system(&r.cfg.model);
    let accepted = r.accepted();
    monotone.push((
        format!("{} {name}", sys.name()),
        !accepted.is_empty() && accepted.windows(2).all(|w| w[1].1 <= w[0].1),
    ));
    let Some(last) = r.hopf() else {
        invariants.push((format!("{} control result", sys.name()), f64::INFINITY, f64::INFINITY));
        return;
    };
    let th = Controls::new().with(name, r.result(&["control", "value"]));
    let (n, g) = hopf_invariants(sys.as_ref(), &th, &last);
    invariants.push((format!("{} control result", sys.name()), n, g));
    let replayed = replay(sys.as_ref(), name, &last, &accepted);
    if replayed.len() != accepted.len() {
        invariants.push((format!("{} accepted points re-solve", sys.name()), f64::INFINITY, f64::INFINITY));
    }
    for (k, (th, hp)) in replayed.iter().enumerate() {
        let (n, g) = hopf_invariants(sys.as_ref(), th, &hp.state);
        invariants.push((format!("{} accepted point {k}", sys.name()), n, g.max(hp.eig_gap)));
    }
}

fn cgl2d_grid(nx: usize, ny: usize, rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>) -> [f64; 2] {
    let mut out = [f64::NAN; 2];
    let started = Instant::now();
    for (k, (expect, lo, hi)) in [(1.25, 1.0, 1.5), (2.0, 1.75, 2.25)].into_iter().enumerate() {
        let r = Run::new(&format!(
            "[model]\nname = cgl2d\nnx = {nx}\nny = {ny}\n[task]\nmode = locate\nlambda_min = {lo}\nlambda_max = {hi}\nsteps = 11\n"
        ));
        let (lambda, mu) = (r.result(&["hopf", "lambda"]), r.result(&["hopf", "mu"]));
        let rel = (lambda - expect).abs() / expect;
        rep.check(
            "3",
            !r.failed() && rel <= CGL_LOCATION_REL,
            format!("CGL-2D {nx}x{ny} Hopf {} at r = {lambda:.10}; relative error vs {expect} = {rel:.2e} <= {CGL_LOCATION_REL}", k + 1),
        );
        rep.check(
            "3",
            (mu - 1.0).abs() <= CGL_MU_TOL,
            format!("CGL-2D {nx}x{ny} Hopf {} mu = {mu:.12}; |mu - 1| = {:.2e} <= {CGL_MU_TOL:e}", k + 1, (mu - 1.0).abs()),
        );
        if let Some(x) = r.hopf() {
            let sys = build_system(&r.cfg.model);
            let (n, g) = hopf_invariants(sys.as_ref(), &Controls::new(), &x);
            invariants.push((format!("cgl2d {nx}x{ny} Hopf {}", k + 1), n, g));
        }
        out[k] = lambda;
    }
    rep.time("3", &format!("CGL-2D {nx}x{ny} locate (both points)"), started.elapsed(), Duration::from_secs(120));
    out
}

fn cgl2d_locations(rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>) {
    let coarse = cgl2d_grid(32, 16, rep, invariants);
    let fine = cgl2d_grid(64, 32, rep, invariants);
    // mesh width in x is 2π/(nx+1): the refinement ratio is 65/33
    let ratio = (2.0 * PI / 33.0) / (2.0 * PI / 65.0);
    for (k, expect) in [1.25, 2.0].into_iter().enumerate() {
        let (e1, e2) = ((coarse[k] - expect).abs(), (fine[k] - expect).abs());
        let order = (e1 / e2).ln() / ratio.ln();
        rep.check(
            "3",
            order >= MIN_ORDER,
            format!("CGL-2D Hopf {} refinement: errors {e1:.3e} -> {e2:.3e}, observed order {order:.3} >= {MIN_ORDER}", k + 1),
        );
    }
}

fn cgl2d_control(rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>, monotone: &mut Vec<(String, bool)>) {
    let r = Run::new(&format!(
        "[model]\nname = cgl2d\nnu = 1\n[task]\nmode = control\nobjective = frequency\ntarget = {CGL_NU_TARGET}\ncontrol = nu\nlambda_min = 1.0\nlambda_max = 1.5\nsteps = 11\n{CONTROL_TOLS}"
    ));
    let nu = r.result(&["control", "value"]);
    let j = r.result(&["control", "J"]);
    let steps = r.result(&["control", "accepted_steps"]);
    rep.check(
        "4",
        !r.failed() && (nu - CGL_NU_TARGET).abs() <= CGL_NU_TOL,
        format!("CGL-2D control nu = {nu:.12}; |nu - {CGL_NU_TARGET}| = {:.2e} <= {CGL_NU_TOL:e}", (nu - CGL_NU_TARGET).abs()),
    );
    rep.check("4", j <= J_TOL, format!("CGL-2D control J = {j:.3e} <= {J_TOL:e}"));
    rep.check(
        "4",
        steps <= MAX_ACCEPTED as f64,
        format!("CGL-2D control accepted steps {steps} <= {MAX_ACCEPTED}"),
    );
    rep.time("4", "CGL-2D control", r.took, Duration::from_secs(600));
    record_control(&r, "nu", invariants, monotone);
}

fn cgl1d_control(rep: &mut Report, invariants: &mut Vec<(String, f64, f64)>, monotone: &mut Vec<(String, bool)>) {
    let r = Run::new(&format!(
        "[model]\nname = cgl1d\n[task]\nmode = control\nobjective = location\ntarget = 1\ncontrol = l\nlambda_min = 0.1\nlambda_max = 0.5\nsteps = 21\n{CONTROL_TOLS}"
    ));
    let l = r.result(&["control", "value"]);
    let discrete = Cgl1d::new(CglParams::default()).length_for_hopf(1, 1.0);
    rep.check(
        "5",
        !r.failed() && (l - 0.5).abs() / 0.5 <= LENGTH_REL,
        format!("CGL-1D control l = {l:.12}; relative error vs 0.5 = {:.2e} <= {LENGTH_REL}", (l - 0.5).abs() / 0.5),
    );
    rep.check(
        "5",
        (l - discrete).abs() <= LENGTH_DISCRETE_TOL,
        format!("CGL-1D control l vs discrete prediction {discrete:.12}: {:.2e} <= {LENGTH_DISCRETE_TOL:e}", (l - discrete).abs()),
    );
    rep.time("5", "CGL-1D control", r.took, Duration::from_secs(30));
    record_control(&r, "l", invariants, monotone);
}

fn fhn_period(c2: f64, rep: &mut Report) {
    let lambda = 1.02 * FhnParams::default().hopf_c1();
    let r = Run::new(&format!(
        "[model]\nname = fhn\nc2 = {c2:?}\n[task]\nmode = simulate\nlambda = {lambda:?}\nt_end = 30000\nsample_dt = 1\nperturbation = 0.01\ntransient = 0.5\n[output]\nformats = csv\n"
    ));
    let period = r.result(&["period", "period"]);
    let expect = 2.0 * PI / FHN_TARGET_MU;
    let rel = (period / expect - 1.0).abs();
    rep.check(
        "6",
        !r.failed() && rel <= PERIOD_REL,
        format!("FHN period at c1 = 1.02 c1*, c2 = {c2:.8}: {period:.3}; relative error vs {expect:.3} = {rel:.2e} <= {PERIOD_REL}"),
    );
    rep.time("6", "FHN simulation", r.took, Duration::from_secs(10));
}

fn property_suite(
    rep: &mut Report,
    invariants: &[(String, f64, f64)],
    monotone: &[(String, bool)],
) {
    let fhn = Fhn::default();
    let bru = Brusselator::new(BrusselatorParams { a: 1.0 });
    let cgl2 = Cgl2d::new(CglParams::default());
    let cgl1 = Cgl1d::new(CglParams::default());

    let worst = [
        gr_jacobian_fd(&fhn, &Controls::new(), (0.0, 0.2), 101),
        gr_jacobian_fd(&bru, &Controls::new(), (1.0, 3.0), 102),
        gr_jacobian_fd(&Cgl2d::with_grid(CglParams::default(), 8, 4, 1.0, 0.5), &Controls::new(), (0.0, 3.0), 103),
        gr_jacobian_fd(&Cgl1d::with_grid(CglParams::default(), 12, 1.0), &Controls::new().with("l", 0.8), (0.0, 3.0), 104),
    ];
    let max = worst.iter().copied().fold(0.0, f64::max);
    rep.check(
        "7a",
        max <= FD_JACOBIAN_REL,
        format!("gr_jacobian vs finite differences, 10 states x 4 models: worst {max:.2e} <= {FD_JACOBIAN_REL:e} (relative to 1 + |J|)"),
    );

    let worst = [
        gradient_fd(&fhn, "c2", Objective::frequency(FHN_TARGET_MU).unwrap(), (0.02, 0.08), 201, |_| (0.03, 0.07), |_, _| vec![0.0; 2]),
        gradient_fd(
            &bru,
            "a",
            Objective::location(3.0).unwrap(),
            (0.6, 2.0),
            202,
            |a| (0.5 * (1.0 + a * a), 1.5 * (1.0 + a * a)),
            |a, b| bru.steady_state(a, b),
        ),
        gradient_fd(&cgl2, "nu", Objective::frequency(CGL_NU_TARGET).unwrap(), (0.5, 5.0), 203, |_| (1.0, 1.5), |_, _| vec![0.0; cgl2.dim()]),
        gradient_fd(
            &cgl1,
            "l",
            Objective::location(1.0).unwrap(),
            (0.6, 1.6),
            204,
            |l| (0.125 / (l * l), 0.375 / (l * l)),
            |_, _| vec![0.0; cgl1.dim()],
        ),
    ];
    let max = worst.iter().copied().fold(0.0, f64::max);
    rep.check(
        "7b",
        max <= FD_GRADIENT_REL,
        format!("reduced gradient vs finite differences of the full solve, 3 controls x 4 models: worst {max:.2e} <= {FD_GRADIENT_REL:e}"),
    );

    let norm = invariants.iter().map(|i| i.1).fold(0.0, f64::max);
    rep.check(
        "7c",
        !invariants.is_empty() && norm <= NORMALIZATION_TOL,
        format!("normalization <c,v> = 0, <c,w> = 1 at {} converged points: worst {norm:.2e} <= {NORMALIZATION_TOL:e}", invariants.len()),
    );
    let bad: Vec<&str> = invariants.iter().filter(|(_, _, g)| g.is_nan() || *g > EIG_GAP_TOL).map(|i| i.0.as_str()).collect();
    let gap = invariants.iter().map(|i| i.2).fold(0.0, f64::max);
    rep.check(
        "7d",
        !invariants.is_empty() && bad.is_empty(),
        format!("eigenvalue gap |i mu - nearest eig| at {} converged points: worst {gap:.2e} <= {EIG_GAP_TOL:e} {bad:?}", invariants.len()),
    );

    for a in [0.5, 1.0, 2.0] {
        let b = 1.0 + a * a;
        let r = Run::new(&format!(
            "[model]\nname = brusselator\na = {a}\n[task]\nmode = locate\nlambda_min = {}\nlambda_max = {}\nsteps = 11\n",
            0.5 * b,
            1.5 * b
        ));
        let (lambda, mu) = (r.result(&["hopf", "lambda"]), r.result(&["hopf", "mu"]));
        let err = (lambda - b).abs().max((mu - a).abs());
        rep.check(
            "7e",
            !r.failed() && err <= BRUSSELATOR_TOL,
            format!("Brusselator a = {a}: b* = {lambda:.12}, mu* = {mu:.12}; error vs (1 + a^2, a) = {err:.2e} <= {BRUSSELATOR_TOL:e}"),
        );
    }

    for (name, ok) in monotone {
        rep.check("7f", *ok, format!("accepted-step J non-increasing in the {name} control run"));
    }
}

fn main() {
    let mut rep = Report { lines: Vec::new() };
    let mut invariants = Vec::new();
    let mut monotone = Vec::new();

    fhn_locate(&mut rep, &mut invariants);
    let c2 = fhn_control(&mut rep, &mut invariants, &mut monotone);
    cgl2d_locations(&mut rep, &mut invariants);
    cgl2d_control(&mut rep, &mut invariants, &mut monotone);
    cgl1d_control(&mut rep, &mut invariants, &mut monotone);
    fhn_period(c2, &mut rep);
    property_suite(&mut rep, &invariants, &monotone);

    let failed: Vec<&String> = rep.lines.iter().filter(|l| !l.0).map(|l| &l.1).collect();
    println!("{} checks, {} failed", rep.lines.len(), failed.len());
    if !failed.is_empty() {
        eprintln!("failed acceptance checks:");
        for line in failed {
            eprintln!("{line}");
        }
        std::process::exit(1);
    }
}
