#![allow(dead_code)]

use hopfctl_core::linalg::{DenseMatrix, SparseMatrix};
use hopfctl_core::models::{Brusselator, BrusselatorParams, Cgl1d, Cgl2d, CglParams, Fhn, FhnParams};
use hopfctl_core::{Controls, DynamicalSystem, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Scalar polynomial `F(u) = Σ coeffs[k] u^k`, independent of λ.
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    fn eval(&self, u: f64, deriv: usize) -> f64 {
        let mut s = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k < deriv {
                continue;
            }
            let mut f = 1.0;
            for j in 0..deriv {
                f *= (k - j) as f64;
            }
            s += c * f * u.powi((k - deriv) as i32);
        }
        s
    }
}

impl DynamicalSystem for Poly {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "poly"
    }
    fn lambda_name(&self) -> &str {
        "lambda"
    }
    fn control_names(&self) -> Vec<&'static str> {
        Vec::new()
    }
    fn default_controls(&self) -> Controls {
        Controls::new()
    }
    fn residual(&self, u: &[f64], _: f64, _: &Controls) -> Vec<f64> {
        vec![self.eval(u[0], 0)]
    }
    fn jacobian(&self, u: &[f64], _: f64, _: &Controls) -> SparseMatrix {
        SparseMatrix::from_triplets(1, 1, vec![(0, 0, self.eval(u[0], 1))])
    }
    fn d_lambda(&self, _: &[f64], _: f64, _: &Controls) -> Vec<f64> {
        vec![0.0]
    }
    fn hessian_action(&self, u: &[f64], _: f64, _: &Controls, z: &[f64]) -> SparseMatrix {
        SparseMatrix::from_triplets(1, 1, vec![(0, 0, self.eval(u[0], 2) * z[0])])
    }
    fn d_lambda_u_action(&self, _: &[f64], _: f64, _: &Controls, _: &[f64]) -> Vec<f64> {
        vec![0.0]
    }
    fn d_control(&self, _: &[f64], _: f64, _: &Controls, name: &str) -> Result<Vec<f64>> {
        Err(hopfctl_core::Error::UnknownControl(name.into()))
    }
    fn d_control_u_action(&self, _: &[f64], _: f64, _: &Controls, name: &str, _: &[f64]) -> Result<Vec<f64>> {
        Err(hopfctl_core::Error::UnknownControl(name.into()))
    }
    fn normalization(&self) -> Vec<f64> {
        vec![1.0]
    }
}

pub fn fhn() -> Fhn {
    Fhn::new(FhnParams::default())
}

pub fn brusselator(a: f64) -> Brusselator {
    Brusselator::new(BrusselatorParams { a })
}

pub fn small_cgl2d() -> Cgl2d {
    Cgl2d::with_grid(CglParams::default(), 6, 4, 1.0, 0.5)
}

pub fn small_cgl1d() -> Cgl1d {
    Cgl1d::with_grid(CglParams::default(), 12, 1.0)
}

/// Induced ∞-norm of a dense matrix difference.
pub fn diff_norm_inf(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().zip(b.row(i)).map(|(x, y)| (x - y).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Central-difference Jacobian of `f` at `x`, row-major.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DenseMatrix {
    let n = x.len();
    let m = f(x).len();
    let mut out = DenseMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
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

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
