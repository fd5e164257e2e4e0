//! `F(u) = (s A + λ B) u`: a linear test system with a planted spectrum.

use alloc::vec;
use alloc::vec::Vec;

use super::unknown;
use crate::error::Result;
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::system::{Controls, DynamicalSystem};

#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: SparseMatrix,
    b: SparseMatrix,
    c: Vec<f64>,
}

impl LinearSystem {
    /// `c` is the normalization function used by the Hopf solve.
    pub fn new(a: &DenseMatrix, b: &DenseMatrix, c: Vec<f64>) -> Self {
        assert!(a.is_square() && b.rows() == a.rows() && b.cols() == a.cols());
        assert_eq!(c.len(), a.rows());
        Self {
            a: SparseMatrix::from_dense(a),
            b: SparseMatrix::from_dense(b),
            c,
        }
    }

    /// Block `[[-1, -ω], [ω, -1]] ⊕ diag(-2, -3, …)` with `B = I`; a Hopf
    /// crossing sits at `λ = 1` with frequency `ω`.
    pub fn planted_hopf(n: usize, omega: f64) -> Self {
        assert!(n >= 2);
        let mut a = DenseMatrix::zeros(n, n);
        a[(0, 0)] = -1.0;
        a[(0, 1)] = -omega;
        a[(1, 0)] = omega;
        a[(1, 1)] = -1.0;
        for i in 2..n {
            a[(i, i)] = -(i as f64);
        }
        let mut c = vec![0.0; n];
        c[1] = 1.0;
        Self::new(&a, &DenseMatrix::identity(n), c)
    }

    fn s(th: &Controls) -> f64 {
        th.get_or("s", 1.0)
    }

    fn operator(&self, lambda: f64, th: &Controls) -> SparseMatrix {
        self.a.scale(Self::s(th)).add_scaled(lambda, &self.b)
    }
}

impl DynamicalSystem for LinearSystem {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn name(&self) -> &str {
        "linear"
    }

    fn lambda_name(&self) -> &str {
        "lambda"
    }

    fn control_names(&self) -> Vec<&'static str> {
        vec!["s"]
    }

    fn default_controls(&self) -> Controls {
        Controls::new().with("s", 1.0)
    }

    fn residual(&self, u: &[f64], lambda: f64, th: &Controls) -> Vec<f64> {
        self.operator(lambda, th).matvec(u)
    }

    fn jacobian(&self, _u: &[f64], lambda: f64, th: &Controls) -> SparseMatrix {
        self.operator(lambda, th)
    }

    fn d_lambda(&self, u: &[f64], _lambda: f64, _th: &Controls) -> Vec<f64> {
        self.b.matvec(u)
    }

    fn hessian_action(&self, _u: &[f64], _l: f64, _th: &Controls, _z: &[f64]) -> SparseMatrix {
        SparseMatrix::zeros(self.dim(), self.dim())
    }

    fn d_lambda_u_action(&self, _u: &[f64], _l: f64, _th: &Controls, z: &[f64]) -> Vec<f64> {
        self.b.matvec(z)
    }

    fn d_control(&self, u: &[f64], _l: f64, _th: &Controls, name: &str) -> Result<Vec<f64>> {
        match name {
            "s" => Ok(self.a.matvec(u)),
            _ => Err(unknown(name)),
        }
    }

    fn d_control_u_action(
        &self,
        _u: &[f64],
        _l: f64,
        _th: &Controls,
        name: &str,
        z: &[f64],
    ) -> Result<Vec<f64>> {
        match name {
            "s" => Ok(self.a.matvec(z)),
            _ => Err(unknown(name)),
        }
    }

    fn normalization(&self) -> Vec<f64> {
        self.c.clone()
    }
}
