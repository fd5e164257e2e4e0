//! FitzHugh–Nagumo in the form `v' = c1 v(v-a)(1-v) - c2 w`, `w' = b(v - c3 w)`.
//!
//! Time is in milliseconds. The bifurcation parameter is `c1`; `c2` is the
//! control.

use alloc::vec;
use alloc::vec::Vec;

use super::unknown;
use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::system::{Controls, DynamicalSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FhnParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for FhnParams {
    fn default() -> Self {
        Self {
            a: -0.12,
            b: 0.011,
            c1: 0.15,
            c2: 0.05,
            c3: 0.55,
        }
    }
}

impl FhnParams {
    /// `c1` at which the trace of the Jacobian at the origin vanishes.
    pub fn hopf_c1(&self) -> f64 {
        self.b * self.c3 / -self.a
    }

    /// Frequency of the critical pair at the origin for the given `c2`.
    pub fn hopf_frequency(&self, c2: f64) -> f64 {
        let bc3 = self.b * self.c3;
        libm::sqrt(c2 * self.b - bc3 * bc3)
    }

    /// `c2` that places the critical frequency at `mu`.
    pub fn c2_for_frequency(&self, mu: f64) -> f64 {
        let bc3 = self.b * self.c3;
        (mu * mu + bc3 * bc3) / self.b
    }
}

#[derive(Debug, Clone, Default)]
pub struct Fhn {
    pub params: FhnParams,
}

impl Fhn {
    pub fn new(params: FhnParams) -> Self {
        Self { params }
    }

    fn g(&self, v: f64) -> f64 {
        v * (v - self.params.a) * (1.0 - v)
    }

    fn dg(&self, v: f64) -> f64 {
        let a = self.params.a;
        -3.0 * v * v + 2.0 * (1.0 + a) * v - a
    }

    fn ddg(&self, v: f64) -> f64 {
        -6.0 * v + 2.0 * (1.0 + self.params.a)
    }

    fn c2(&self, th: &Controls) -> f64 {
        th.get_or("c2", self.params.c2)
    }
}

impl DynamicalSystem for Fhn {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "fhn"
    }

    fn lambda_name(&self) -> &str {
        "c1"
    }

    fn control_names(&self) -> Vec<&'static str> {
        vec!["c2"]
    }

    fn default_controls(&self) -> Controls {
        Controls::new().with("c2", self.params.c2)
    }

    fn residual(&self, u: &[f64], c1: f64, th: &Controls) -> Vec<f64> {
        let (v, w) = (u[0], u[1]);
        let p = &self.params;
        vec![c1 * self.g(v) - self.c2(th) * w, p.b * (v - p.c3 * w)]
    }

    fn jacobian(&self, u: &[f64], c1: f64, th: &Controls) -> SparseMatrix {
        let p = &self.params;
        SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, c1 * self.dg(u[0])),
                (0, 1, -self.c2(th)),
                (1, 0, p.b),
                (1, 1, -p.b * p.c3),
            ],
        )
    }

    fn d_lambda(&self, u: &[f64], _c1: f64, _th: &Controls) -> Vec<f64> {
        vec![self.g(u[0]), 0.0]
    }

    fn hessian_action(&self, u: &[f64], c1: f64, _th: &Controls, z: &[f64]) -> SparseMatrix {
        SparseMatrix::from_triplets(2, 2, vec![(0, 0, c1 * self.ddg(u[0]) * z[0])])
    }

    fn d_lambda_u_action(&self, u: &[f64], _c1: f64, _th: &Controls, z: &[f64]) -> Vec<f64> {
        vec![self.dg(u[0]) * z[0], 0.0]
    }

    fn d_control(&self, u: &[f64], _c1: f64, _th: &Controls, name: &str) -> Result<Vec<f64>> {
        match name {
            "c2" => Ok(vec![-u[1], 0.0]),
            _ => Err(unknown(name)),
        }
    }

    fn d_control_u_action(
        &self,
        _u: &[f64],
        _c1: f64,
        _th: &Controls,
        name: &str,
        z: &[f64],
    ) -> Result<Vec<f64>> {
        match name {
            "c2" => Ok(vec![-z[1], 0.0]),
            _ => Err(unknown(name)),
        }
    }

    fn normalization(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
}
