mod common;

use common::*;
use core::f64::consts::PI;
use hopfctl_core::hopf::{locate_hopf, LocateOptions};
use hopfctl_core::linalg::{eig_all, eig_near_shift, Complex64, DenseMatrix};
use hopfctl_core::models::{Cgl1d, Cgl2d, CglParams, Fhn, FhnParams, LinearSystem};
use hopfctl_core::system::{default_fd_step, fd_validate};
use hopfctl_core::{Controls, DynamicalSystem};

const FIRST_ORDER_TOL: f64 = 1e-5;
const SECOND_ORDER_TOL: f64 = 1e-4;

fn check_random_points(sys: &dyn DynamicalSystem, lambda: (f64, f64), box_: f64, controls: &[(&str, f64, f64)], seed: u64) {
    let mut r = rng(seed);
    for draw in 0..20 {
        let u = uniform(&mut r, sys.dim(), -box_, box_);
        let lam = uniform(&mut r, 1, lambda.0, lambda.1)[0];
        let mut th = Controls::new();
        for (name, lo, hi) in controls {
            th.set(name, uniform(&mut r, 1, *lo, *hi)[0]);
        }
        let rep = fd_validate(sys, &u, lam, &th, default_fd_step(&u)).unwrap();
        assert!(
            rep.passes(FIRST_ORDER_TOL, SECOND_ORDER_TOL),
            "{} draw {draw}: {rep:?}",
            sys.name()
        );
    }
}

#[test]
fn fhn_derivatives_at_random_points() {
    check_random_points(&fhn(), (0.0, 0.2), 1.0, &[("c2", 0.01, 0.1)], 1);
}

#[test]
fn brusselator_derivatives_at_random_points() {
    check_random_points(&brusselator(1.0), (0.5, 3.0), 3.0, &[("a", 0.2, 2.5)], 2);
}

#[test]
fn cgl2d_derivatives_at_random_points() {
    check_random_points(&small_cgl2d(), (0.0, 3.0), 1.0, &[("nu", 0.5, 5.0)], 3);
}

#[test]
fn cgl1d_derivatives_at_random_points() {
    check_random_points(&small_cgl1d(), (0.0, 3.0), 1.0, &[("l", 0.5, 2.0), ("nu", 0.5, 5.0)], 4);
}

#[test]
fn linear_system_is_exact_for_any_step() {
    let a = DenseMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[-1.0, 0.5, 3.0], &[0.0, 4.0, -2.0]]);
    let sys = LinearSystem::new(&a, &DenseMatrix::identity(3), vec![1.0, 0.0, 0.0]);
    for step in [1e-6, 1e-3, 0.1, 1.0] {
        let rep = fd_validate(&sys, &[0.3, -0.7, 1.1], 0.4, &Controls::new(), step).unwrap();
        assert!(rep.passes(1e-10, 1e-10), "step {step}: {rep:?}");
    }
}

#[test]
fn fhn_origin_at_critical_c1() {
    let rep = fd_validate(&fhn(), &[0.0, 0.0], 0.05, &Controls::new(), 1e-6).unwrap();
    assert!(rep.passes(1e-5, 1e-5), "{rep:?}");
}

#[test]
fn cgl2d_trivial_state() {
    let sys = Cgl2d::new(CglParams::default());
    let u = vec![0.0; sys.dim()];
    let rep = fd_validate(&sys, &u, 1.0, &Controls::new(), 1e-6).unwrap();
    assert!(rep.jacobian <= 1e-5, "{rep:?}");
    assert!(rep.hessian_action <= 1e-4, "{rep:?}");
}

#[test]
fn fhn_hopf_location_independent_of_c2() {
    let sys = fhn();
    let c = sys.normalization();
    let mut found = Vec::new();
    for c2 in [0.05, 0.026] {
        let th = Controls::new().with("c2", c2);
        let (_, _, hp) =
            locate_hopf(&sys, &th, &[0.0, 0.0], &c, &LocateOptions::new(0.03, 0.07, 9)).unwrap();
        found.push(hp.lambda());
    }
    assert!((found[0] - found[1]).abs() <= 1e-8, "{found:?}");
}

#[test]
fn fhn_jacobian_and_residual_examples() {
    let p = FhnParams::default();
    let sys = Fhn::new(p);
    let th = Controls::new();
    assert_eq!(sys.residual(&[1.0, 0.0], 0.3, &th), vec![0.0, p.b]);
    let j = sys.jacobian(&[0.0, 0.0], p.hopf_c1(), &th).to_dense();
    assert!((j[(0, 0)] + j[(1, 1)]).abs() < 1e-15);
    assert!((p.hopf_c1() - 0.0504167).abs() < 1e-7);
}

#[test]
fn cgl2d_spectrum_at_trivial_state() {
    // full spectrum on a coarse grid
    let sys = Cgl2d::with_grid(CglParams::default(), 16, 8, 1.0, 0.5);
    let r = 0.3;
    let j = sys.jacobian(&vec![0.0; sys.dim()], r, &Controls::new()).to_dense();
    let eigs = eig_all(&j).unwrap();
    let lead = eigs.iter().map(|e| e.value.re).fold(f64::NEG_INFINITY, f64::max);
    assert!((lead - (r - sys.trivial_hopf(1, 1))).abs() < 1e-9);
    for e in &eigs {
        assert!((e.value.im.abs() - 1.0).abs() < 1e-9);
    }

    // leading pair on the default grid
    let sys = Cgl2d::new(CglParams::default());
    let j = sys.jacobian(&vec![0.0; sys.dim()], r, &Controls::new());
    let near = eig_near_shift(&j, Complex64::new(0.0, 1.0), 2).unwrap();
    let lam = sys.trivial_hopf(1, 1);
    assert!((lam / 1.25 - 1.0).abs() < 0.01, "Λ_h = {lam}");
    for (e, m1) in near.iter().zip([1, 2]) {
        let want = Complex64::new(r - sys.trivial_hopf(m1, 1), 1.0);
        assert!((e.value - want).norm() < 1e-8, "{:?}", e.value);
    }
}

#[test]
fn cgl2d_constant_state_nonlinearity() {
    let p = CglParams::default();
    let sys = Cgl2d::with_grid(p, 8, 6, 1.0, 0.5);
    let mut u = vec![0.0; sys.dim()];
    for k in 0..sys.dim() / 2 {
        u[2 * k] = 1.0;
    }
    let f = sys.residual(&u, 0.0, &Controls::new());
    // an interior node away from the boundary has zero Laplacian
    let k = 3 * sys.ny + 2;
    assert!((f[2 * k] - (-p.c3 - p.c5)).abs() < 1e-12, "{}", f[2 * k]);
}

#[test]
fn cgl1d_first_hopf_and_length_scaling() {
    let sys = Cgl1d::new(CglParams::default());
    let r1 = sys.trivial_hopf(1, 1.0);
    assert!((r1 / 0.25 - 1.0).abs() < 0.01, "{r1}");
    let r2 = sys.trivial_hopf(1, 2.0);
    assert!((r2 / r1 - 0.25).abs() < 1e-12);
}

#[test]
fn cgl1d_length_derivative_at_trivial_state() {
    let sys = Cgl1d::new(CglParams::default());
    let mut r = rng(9);
    let z = uniform(&mut r, sys.dim(), -1.0, 1.0);
    let u = vec![0.0; sys.dim()];
    let l = 1.3;
    let th = Controls::new().with("l", l);
    let got = sys.d_control_u_action(&u, 0.0, &th, "l", &z).unwrap();
    // Laplacian part of F_u z: F_u z minus the r and rotation terms (r = 0)
    let nu = sys.params().nu;
    let fz = sys.jacobian(&u, 0.0, &th).matvec(&z);
    let want: Vec<f64> = (0..sys.n)
        .flat_map(|i| {
            let lap_re = fz[2 * i] + nu * z[2 * i + 1];
            let lap_im = fz[2 * i + 1] - nu * z[2 * i];
            [-2.0 / l * lap_re, -2.0 / l * lap_im]
        })
        .collect();
    assert!(max_abs_diff(&got, &want) < 1e-9 * (1.0 + want.iter().fold(0.0f64, |m, x| m.max(x.abs()))));
}

#[test]
fn brusselator_examples() {
    for a in [0.5, 1.0, 2.0] {
        let sys = brusselator(a);
        let b = 1.7;
        let th = Controls::new();
        let u = sys.steady_state(a, b);
        assert!(sys.residual(&u, b, &th).iter().all(|x| x.abs() < 1e-14));
        let u = [0.3, -1.2];
        assert_eq!(sys.d_lambda(&u, b, &th), vec![-0.3, 0.3]);
    }
}

/// Observed order `p` from three grids: solves
/// `(v1 - v2) / (v2 - v3) = (h1^p - h2^p) / (h2^p - h3^p)` by bisection.
fn richardson_order(values: [f64; 3], widths: [f64; 3]) -> f64 {
    let target = (values[0] - values[1]) / (values[1] - values[2]);
    let model = |p: f64| {
        let [h1, h2, h3] = widths.map(|h| h.powf(p));
        (h1 - h2) / (h2 - h3)
    };
    let (mut lo, mut hi) = (0.5, 6.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn cgl2d_discrete_hopf_refinement_order() {
    let grids = [(16usize, 8usize), (32, 16), (64, 32)];
    for (m1, m2) in [(1, 1), (2, 1)] {
        let mut vals = [0.0; 3];
        let mut h = [0.0; 3];
        for (g, (nx, ny)) in grids.iter().enumerate() {
            let sys = Cgl2d::with_grid(CglParams::default(), *nx, *ny, 1.0, 0.5);
            vals[g] = sys.trivial_hopf(m1, m2);
            h[g] = sys.spacing().0;
        }
        let order = richardson_order(vals, h);
        assert!(order >= 1.9, "mode ({m1},{m2}): order {order}");
    }
}

#[test]
fn cgl2d_second_hopf_near_two() {
    let sys = Cgl2d::new(CglParams::default());
    assert!((sys.trivial_hopf(2, 1) / 2.0 - 1.0).abs() < 0.01);
    assert!((sys.continuum_hopf(2, 1) - 2.0).abs() < 1e-15);
    assert!((sys.continuum_hopf(1, 1) - 1.25).abs() < 1e-15);
}

/// `f = (π² - x²)(π²/4 - y²)` vanishes on the boundary of the default domain,
/// so the interior-node rule is the trapezoidal rule and converges at O(h²).
#[test]
fn cgl2d_inner_product_converges() {
    let (a, b) = (PI, PI / 2.0);
    let exact = 16.0 * a.powi(5) / 15.0 * 16.0 * b.powi(5) / 15.0;
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for (nx, ny) in [(8usize, 4usize), (16, 8), (32, 16), (64, 32)] {
        let sys = Cgl2d::with_grid(CglParams::default(), nx, ny, 1.0, 0.5);
        let f = sys.sample(|x, y| (a * a - x * x) * (b * b - y * y));
        let mut v = vec![0.0; sys.dim()];
        for (k, fk) in f.iter().enumerate() {
            v[2 * k] = *fk;
        }
        errs.push((sys.inner_product(&v, &v) - exact).abs());
        hs.push(sys.spacing().0);
    }
    for k in 1..errs.len() {
        let order = (errs[k - 1] / errs[k]).ln() / (hs[k - 1] / hs[k]).ln();
        assert!(order >= 1.9, "order {order} errors {errs:?}");
    }

    // the constant function does not vanish at the boundary: only O(h)
    let sys = Cgl2d::new(CglParams::default());
    let mut one = vec![0.0; sys.dim()];
    for k in 0..sys.dim() / 2 {
        one[2 * k] = 1.0;
    }
    let area = 2.0 * PI * PI;
    let (nx, ny) = (sys.nx as f64, sys.ny as f64);
    let want = area * nx / (nx + 1.0) * ny / (ny + 1.0);
    assert!((sys.inner_product(&one, &one) - want).abs() < 1e-12);
}

#[test]
fn inner_products_are_positive() {
    let mut r = rng(5);
    let systems: Vec<Box<dyn DynamicalSystem>> =
        vec![Box::new(fhn()), Box::new(brusselator(1.0)), Box::new(small_cgl2d()), Box::new(small_cgl1d())];
    for sys in &systems {
        for _ in 0..20 {
            let x = uniform(&mut r, sys.dim(), -1.0, 1.0);
            assert!(sys.inner_product(&x, &x) > 0.0);
        }
    }
}
