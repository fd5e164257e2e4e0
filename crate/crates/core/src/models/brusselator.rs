//! Brusselator `u1' = a - (b+1) u1 + u1² u2`, `u2' = b u1 - u1² u2` with
//! bifurcation parameter `b` and control `a`. Hopf at `b = 1 + a²`, `μ = a`.

use alloc::vec;
use alloc::vec::Vec;

use super::unknown;
use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::system::{Controls, DynamicalSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrusselatorParams {
    pub a: f64,
}

impl Default for BrusselatorParams {
    fn default() -> Self {
        Self { a: 1.0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Brusselator {
    pub params: BrusselatorParams,
}

impl Brusselator {
    pub fn new(params: BrusselatorParams) -> Self {
        Self { params }
    }

    fn a(&self, th: &Controls) -> f64 {
        th.get_or("a", self.params.a)
    }

    pub fn steady_state(&self, a: f64, b: f64) -> Vec<f64> {
        vec![a, b / a]
    }
}

impl DynamicalSystem for Brusselator {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "brusselator"
    }

    fn lambda_name(&self) -> &str {
        "b"
    }

    fn control_names(&self) -> Vec<&'static str> {
        vec!["a"]
    }

    fn default_controls(&self) -> Controls {
        Controls::new().with("a", self.params.a)
    }

    fn residual(&self, u: &[f64], b: f64, th: &Controls) -> Vec<f64> {
        let a = self.a(th);
        let q = u[0] * u[0] * u[1];
        vec![a - (b + 1.0) * u[0] + q, b * u[0] - q]
    }

    fn jacobian(&self, u: &[f64], b: f64, _th: &Controls) -> SparseMatrix {
        let (x, y) = (u[0], u[1]);
        SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, -(b + 1.0) + 2.0 * x * y),
                (0, 1, x * x),
                (1, 0, b - 2.0 * x * y),
                (1, 1, -x * x),
            ],
        )
    }

    fn d_lambda(&self, u: &[f64], _b: f64, _th: &Controls) -> Vec<f64> {
        vec![-u[0], u[0]]
    }

    fn hessian_action(&self, u: &[f64], _b: f64, _th: &Controls, z: &[f64]) -> SparseMatrix {
        let (x, y) = (u[0], u[1]);
        let d11 = 2.0 * (y * z[0] + x * z[1]);
        let d12 = 2.0 * x * z[0];
        SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, d11), (0, 1, d12), (1, 0, -d11), (1, 1, -d12)],
        )
    }

    fn d_lambda_u_action(&self, _u: &[f64], _b: f64, _th: &Controls, z: &[f64]) -> Vec<f64> {
        vec![-z[0], z[0]]
    }

    fn d_control(&self, _u: &[f64], _b: f64, _th: &Controls, name: &str) -> Result<Vec<f64>> {
        match name {
            "a" => Ok(vec![1.0, 0.0]),
            _ => Err(unknown(name)),
        }
    }

    fn d_control_u_action(
        &self,
        _u: &[f64],
        _b: f64,
        _th: &Controls,
        name: &str,
        _z: &[f64],
    ) -> Result<Vec<f64>> {
        match name {
            "a" => Ok(vec![0.0, 0.0]),
            _ => Err(unknown(name)),
        }
    }

    fn normalization(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
}
