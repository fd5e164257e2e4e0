//! Cubic–quintic complex Ginzburg–Landau equation in real two-component form,
//! discretized by second-order finite differences with homogeneous Dirichlet
//! conditions (only interior nodes are stored).
//!
//! Per node the unknowns are `(u1, u2)` at indices `2k` and `2k + 1`:
//!
//! ```text
//! F1 = Δu1 + r u1 - ν u2 - ρ (c3 u1 - m u2) - c5 ρ² u1
//! F2 = Δu2 + r u2 + ν u1 - ρ (m u1 + c3 u2) - c5 ρ² u2,   ρ = u1² + u2²
//! ```
//!
//! The bifurcation parameter is `r`. The trivial state `u = 0` loses
//! stability through Hopf points at the Laplacian eigenvalues, with `μ = ν`.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use super::unknown;
use crate::error::Result;
use crate::linalg::{SparseMatrix, DenseMatrix};
use crate::system::{Controls, DynamicalSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CglParams {
    /// Coefficient `m` of the dispersive part of the cubic term.
    pub mu_cgl: f64,
    pub nu: f64,
    pub c3: f64,
    pub c5: f64,
}

impl Default for CglParams {
    fn default() -> Self {
        Self {
            mu_cgl: 0.1,
            nu: 1.0,
            c3: -1.0,
            c5: 1.0,
        }
    }
}

/// Pointwise nonlinear terms and their derivatives.
#[derive(Debug, Clone, Copy)]
struct Local {
    m: f64,
    c3: f64,
    c5: f64,
}

impl Local {
    fn value(&self, u1: f64, u2: f64) -> (f64, f64) {
        let rho = u1 * u1 + u2 * u2;
        let p = self.c3 * u1 - self.m * u2;
        let q = self.m * u1 + self.c3 * u2;
        (
            -rho * p - self.c5 * rho * rho * u1,
            -rho * q - self.c5 * rho * rho * u2,
        )
    }

    fn jac(&self, u1: f64, u2: f64) -> [f64; 4] {
        let (m, c3, c5) = (self.m, self.c3, self.c5);
        let rho = u1 * u1 + u2 * u2;
        let p = c3 * u1 - m * u2;
        let q = m * u1 + c3 * u2;
        let cross = 4.0 * c5 * rho * u1 * u2;
        [
            -2.0 * u1 * p - c3 * rho - c5 * (4.0 * rho * u1 * u1 + rho * rho),
            -2.0 * u2 * p + m * rho - cross,
            -2.0 * u1 * q - m * rho - cross,
            -2.0 * u2 * q - c3 * rho - c5 * (4.0 * rho * u2 * u2 + rho * rho),
        ]
    }

    /// Derivative of [`Local::jac`] along `(z1, z2)`.
    fn djac(&self, u1: f64, u2: f64, z1: f64, z2: f64) -> [f64; 4] {
        let (m, c3, c5) = (self.m, self.c3, self.c5);
        let rho = u1 * u1 + u2 * u2;
        let rz = 2.0 * (u1 * z1 + u2 * z2);
        let p = c3 * u1 - m * u2;
        let q = m * u1 + c3 * u2;
        let pz = c3 * z1 - m * z2;
        let qz = m * z1 + c3 * z2;
        let cross = 4.0 * c5 * (rz * u1 * u2 + rho * z1 * u2 + rho * u1 * z2);
        [
            -2.0 * z1 * p - 2.0 * u1 * pz - c3 * rz
                - c5 * (4.0 * rz * u1 * u1 + 8.0 * rho * u1 * z1 + 2.0 * rho * rz),
            -2.0 * z2 * p - 2.0 * u2 * pz + m * rz - cross,
            -2.0 * z1 * q - 2.0 * u1 * qz - m * rz - cross,
            -2.0 * z2 * q - 2.0 * u2 * qz - c3 * rz
                - c5 * (4.0 * rz * u2 * u2 + 8.0 * rho * u2 * z2 + 2.0 * rho * rz),
        ]
    }
}

/// Shared finite-difference machinery for both dimensions.
#[derive(Debug, Clone)]
struct Core {
    params: CglParams,
    /// Scalar Laplacian on interior nodes.
    lap: SparseMatrix,
    /// Quadrature weight of each node.
    weight: f64,
    nodes: usize,
}

impl Core {
    fn local(&self) -> Local {
        Local {
            m: self.params.mu_cgl,
            c3: self.params.c3,
            c5: self.params.c5,
        }
    }

    /// `(Δ_s ⊗ I) u` where `Δ_s = s · lap`.
    fn lap_apply(&self, s: f64, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for (i, j, v) in self.lap.iter() {
            out[2 * i] += s * v * u[2 * j];
            out[2 * i + 1] += s * v * u[2 * j + 1];
        }
        out
    }

    fn residual(&self, u: &[f64], r: f64, nu: f64, s: f64) -> Vec<f64> {
        let mut f = self.lap_apply(s, u);
        let loc = self.local();
        for k in 0..self.nodes {
            let (u1, u2) = (u[2 * k], u[2 * k + 1]);
            let (n1, n2) = loc.value(u1, u2);
            f[2 * k] += r * u1 - nu * u2 + n1;
            f[2 * k + 1] += r * u2 + nu * u1 + n2;
        }
        f
    }

    fn jacobian(&self, u: &[f64], r: f64, nu: f64, s: f64) -> SparseMatrix {
        let loc = self.local();
        let mut t = Vec::with_capacity(2 * self.lap.nnz() + 4 * self.nodes);
        for (i, j, v) in self.lap.iter() {
            t.push((2 * i, 2 * j, s * v));
            t.push((2 * i + 1, 2 * j + 1, s * v));
        }
        for k in 0..self.nodes {
            let b = loc.jac(u[2 * k], u[2 * k + 1]);
            t.push((2 * k, 2 * k, r + b[0]));
            t.push((2 * k, 2 * k + 1, -nu + b[1]));
            t.push((2 * k + 1, 2 * k, nu + b[2]));
            t.push((2 * k + 1, 2 * k + 1, r + b[3]));
        }
        SparseMatrix::from_triplets(2 * self.nodes, 2 * self.nodes, t)
    }

    fn hessian_action(&self, u: &[f64], z: &[f64]) -> SparseMatrix {
        let loc = self.local();
        let mut t = Vec::with_capacity(4 * self.nodes);
        for k in 0..self.nodes {
            let b = loc.djac(u[2 * k], u[2 * k + 1], z[2 * k], z[2 * k + 1]);
            t.push((2 * k, 2 * k, b[0]));
            t.push((2 * k, 2 * k + 1, b[1]));
            t.push((2 * k + 1, 2 * k, b[2]));
            t.push((2 * k + 1, 2 * k + 1, b[3]));
        }
        SparseMatrix::from_triplets(2 * self.nodes, 2 * self.nodes, t)
    }

    fn rotate(z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        for k in 0..z.len() / 2 {
            out[2 * k] = -z[2 * k + 1];
            out[2 * k + 1] = z[2 * k];
        }
        out
    }

    fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weight * crate::linalg::dot(x, y)
    }
}

/// Second-order three-point Laplacian on `n` interior nodes of spacing `h`.
fn lap_1d(n: usize, h: f64) -> SparseMatrix {
    let s = 1.0 / (h * h);
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, -2.0 * s));
        if i > 0 {
            t.push((i, i - 1, s));
        }
        if i + 1 < n {
            t.push((i, i + 1, s));
        }
    }
    SparseMatrix::from_triplets(n, n, t)
}

/// Eigenvalue `Λ_m` of `-Δ_h` for a three-point Laplacian on an interval of
/// length `len` with `n` interior nodes.
pub fn discrete_dirichlet_eigenvalue(n: usize, len: f64, m: usize) -> f64 {
    let h = len / (n as f64 + 1.0);
    let s = libm::sin(m as f64 * PI * h / (2.0 * len));
    4.0 / (h * h) * s * s
}

/// The equation on `[-l1 π, l1 π] × [-l2 π, l2 π]`.
#[derive(Debug, Clone)]
pub struct Cgl2d {
    core: Core,
    pub nx: usize,
    pub ny: usize,
    pub l1: f64,
    pub l2: f64,
    hx: f64,
    hy: f64,
}

impl Cgl2d {
    /// Default domain and 32 × 16 grid.
    pub fn new(params: CglParams) -> Self {
        Self::with_grid(params, 32, 16, 1.0, 0.5)
    }

    pub fn with_grid(params: CglParams, nx: usize, ny: usize, l1: f64, l2: f64) -> Self {
        assert!(nx >= 4 && ny >= 4, "grid sizes must be at least 4");
        assert!(l1 > 0.0 && l2 > 0.0);
        let hx = 2.0 * l1 * PI / (nx as f64 + 1.0);
        let hy = 2.0 * l2 * PI / (ny as f64 + 1.0);
        let (sx, sy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
        let nodes = nx * ny;
        let mut t = Vec::with_capacity(5 * nodes);
        for i in 0..nx {
            for j in 0..ny {
                let k = i * ny + j;
                t.push((k, k, -2.0 * sx - 2.0 * sy));
                if i > 0 {
                    t.push((k, k - ny, sx));
                }
                if i + 1 < nx {
                    t.push((k, k + ny, sx));
                }
                if j > 0 {
                    t.push((k, k - 1, sy));
                }
                if j + 1 < ny {
                    t.push((k, k + 1, sy));
                }
            }
        }
        let lap = SparseMatrix::from_triplets(nodes, nodes, t);
        Self {
            core: Core {
                params,
                lap,
                weight: hx * hy,
                nodes,
            },
            nx,
            ny,
            l1,
            l2,
            hx,
            hy,
        }
    }

    pub fn params(&self) -> &CglParams {
        &self.core.params
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.hx, self.hy)
    }

    /// Coordinates of node `k`.
    pub fn node(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.ny, k % self.ny);
        (
            -self.l1 * PI + (i as f64 + 1.0) * self.hx,
            -self.l2 * PI + (j as f64 + 1.0) * self.hy,
        )
    }

    /// Samples `f` on the interior nodes (one scalar per node).
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.core.nodes)
            .map(|k| {
                let (x, y) = self.node(k);
                f(x, y)
            })
            .collect()
    }

    /// Discrete Hopf location `r = Λ_h^{(m1, m2)}` of the trivial branch.
    pub fn trivial_hopf(&self, m1: usize, m2: usize) -> f64 {
        discrete_dirichlet_eigenvalue(self.nx, 2.0 * self.l1 * PI, m1)
            + discrete_dirichlet_eigenvalue(self.ny, 2.0 * self.l2 * PI, m2)
    }

    /// Continuum counterpart of [`Cgl2d::trivial_hopf`].
    pub fn continuum_hopf(&self, m1: usize, m2: usize) -> f64 {
        let a = m1 as f64 / (2.0 * self.l1);
        let b = m2 as f64 / (2.0 * self.l2);
        a * a + b * b
    }

    /// Real and imaginary parts `(v, w)` of the trivial-state eigenvector for
    /// eigenvalue `r - Λ + iν`, built from the discrete sine mode `(m1, m2)`.
    pub fn trivial_mode(&self, m1: usize, m2: usize) -> (Vec<f64>, Vec<f64>) {
        let (lx, ly) = (2.0 * self.l1 * PI, 2.0 * self.l2 * PI);
        let phi = self.sample(|x, y| {
            libm::sin(m1 as f64 * PI * (x + self.l1 * PI) / lx)
                * libm::sin(m2 as f64 * PI * (y + self.l2 * PI) / ly)
        });
        let mut v = vec![0.0; 2 * phi.len()];
        let mut w = vec![0.0; 2 * phi.len()];
        for (k, p) in phi.iter().enumerate() {
            v[2 * k] = *p;
            w[2 * k + 1] = -*p;
        }
        (v, w)
    }

    /// Scalar Laplacian on the interior nodes.
    pub fn laplacian(&self) -> &SparseMatrix {
        &self.core.lap
    }

    pub fn laplacian_dense(&self) -> DenseMatrix {
        self.core.lap.to_dense()
    }

    fn nu(&self, th: &Controls) -> f64 {
        th.get_or("nu", self.core.params.nu)
    }
}

impl DynamicalSystem for Cgl2d {
    fn dim(&self) -> usize {
        2 * self.core.nodes
    }

    fn name(&self) -> &str {
        "cgl2d"
    }

    fn lambda_name(&self) -> &str {
        "r"
    }

    fn control_names(&self) -> Vec<&'static str> {
        vec!["nu"]
    }

    fn default_controls(&self) -> Controls {
        Controls::new().with("nu", self.core.params.nu)
    }

    fn residual(&self, u: &[f64], r: f64, th: &Controls) -> Vec<f64> {
        self.core.residual(u, r, self.nu(th), 1.0)
    }

    fn jacobian(&self, u: &[f64], r: f64, th: &Controls) -> SparseMatrix {
        self.core.jacobian(u, r, self.nu(th), 1.0)
    }

    fn d_lambda(&self, u: &[f64], _r: f64, _th: &Controls) -> Vec<f64> {
        u.to_vec()
    }

    fn hessian_action(&self, u: &[f64], _r: f64, _th: &Controls, z: &[f64]) -> SparseMatrix {
        self.core.hessian_action(u, z)
    }

    fn d_lambda_u_action(&self, _u: &[f64], _r: f64, _th: &Controls, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }

    fn d_control(&self, u: &[f64], _r: f64, _th: &Controls, name: &str) -> Result<Vec<f64>> {
        match name {
            "nu" => Ok(Core::rotate(u)),
            _ => Err(unknown(name)),
        }
    }

    fn d_control_u_action(
        &self,
        _u: &[f64],
        _r: f64,
        _th: &Controls,
        name: &str,
        z: &[f64],
    ) -> Result<Vec<f64>> {
        match name {
            "nu" => Ok(Core::rotate(z)),
            _ => Err(unknown(name)),
        }
    }

    fn inner_product(&self, x: &[f64], y: &[f64]) -> f64 {
        self.core.inner(x, y)
    }

    fn riesz(&self, c: &[f64]) -> Vec<f64> {
        c.iter().map(|x| self.core.weight * x).collect()
    }

    /// `((x+π/2)² + (y+π)², −(x+π/2)² − (y+π)²)` at every node.
    fn normalization(&self) -> Vec<f64> {
        let q = self.sample(|x, y| (x + PI / 2.0) * (x + PI / 2.0) + (y + PI) * (y + PI));
        let mut c = vec![0.0; 2 * q.len()];
        for (k, v) in q.iter().enumerate() {
            c[2 * k] = *v;
            c[2 * k + 1] = -*v;
        }
        c
    }
}

/// The equation on `[-l π, l π]` with the half-length `l` as a control.
///
/// The Laplacian is stored on the reference interval `l = 1` and scaled by
/// `1/l²`. Quadrature weights and the normalization function are fixed at the
/// construction-time half-length.
#[derive(Debug, Clone)]
pub struct Cgl1d {
    core: Core,
    pub n: usize,
    /// Half-length used for the quadrature weights and the default of `l`.
    pub l0: f64,
}

impl Cgl1d {
    /// Default grid of 64 interior nodes on `[-π, π]`.
    pub fn new(params: CglParams) -> Self {
        Self::with_grid(params, 64, 1.0)
    }

    pub fn with_grid(params: CglParams, n: usize, l0: f64) -> Self {
        assert!(n >= 4, "grid size must be at least 4");
        assert!(l0 > 0.0);
        let h_ref = 2.0 * PI / (n as f64 + 1.0);
        Self {
            core: Core {
                params,
                lap: lap_1d(n, h_ref),
                weight: l0 * h_ref,
                nodes: n,
            },
            n,
            l0,
        }
    }

    pub fn params(&self) -> &CglParams {
        &self.core.params
    }

    /// Node coordinates at the construction-time half-length.
    pub fn nodes(&self) -> Vec<f64> {
        let h = 2.0 * self.l0 * PI / (self.n as f64 + 1.0);
        (0..self.n)
            .map(|i| -self.l0 * PI + (i as f64 + 1.0) * h)
            .collect()
    }

    /// Discrete Hopf location of mode `m` for half-length `l`.
    pub fn trivial_hopf(&self, m: usize, l: f64) -> f64 {
        discrete_dirichlet_eigenvalue(self.n, 2.0 * PI, m) / (l * l)
    }

    /// Half-length that puts the discrete mode-`m` Hopf point at `r`.
    pub fn length_for_hopf(&self, m: usize, r: f64) -> f64 {
        libm::sqrt(discrete_dirichlet_eigenvalue(self.n, 2.0 * PI, m) / r)
    }

    /// Real and imaginary parts of the trivial-state eigenvector of mode `m`.
    pub fn trivial_mode(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let mut v = vec![0.0; 2 * self.n];
        let mut w = vec![0.0; 2 * self.n];
        for i in 0..self.n {
            let p = libm::sin(m as f64 * PI * (i as f64 + 1.0) / (self.n as f64 + 1.0));
            v[2 * i] = p;
            w[2 * i + 1] = -p;
        }
        (v, w)
    }

    fn nu(&self, th: &Controls) -> f64 {
        th.get_or("nu", self.core.params.nu)
    }

    fn l(&self, th: &Controls) -> f64 {
        th.get_or("l", self.l0)
    }
}

impl DynamicalSystem for Cgl1d {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn name(&self) -> &str {
        "cgl1d"
    }

    fn lambda_name(&self) -> &str {
        "r"
    }

    fn control_names(&self) -> Vec<&'static str> {
        vec!["l", "nu"]
    }

    fn default_controls(&self) -> Controls {
        Controls::new()
            .with("l", self.l0)
            .with("nu", self.core.params.nu)
    }

    fn residual(&self, u: &[f64], r: f64, th: &Controls) -> Vec<f64> {
        let l = self.l(th);
        self.core.residual(u, r, self.nu(th), 1.0 / (l * l))
    }

    fn jacobian(&self, u: &[f64], r: f64, th: &Controls) -> SparseMatrix {
        let l = self.l(th);
        self.core.jacobian(u, r, self.nu(th), 1.0 / (l * l))
    }

    fn d_lambda(&self, u: &[f64], _r: f64, _th: &Controls) -> Vec<f64> {
        u.to_vec()
    }

    fn hessian_action(&self, u: &[f64], _r: f64, _th: &Controls, z: &[f64]) -> SparseMatrix {
        self.core.hessian_action(u, z)
    }

    fn d_lambda_u_action(&self, _u: &[f64], _r: f64, _th: &Controls, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }

    fn d_control(&self, u: &[f64], _r: f64, th: &Controls, name: &str) -> Result<Vec<f64>> {
        match name {
            "nu" => Ok(Core::rotate(u)),
            "l" => {
                let l = self.l(th);
                Ok(self.core.lap_apply(-2.0 / (l * l * l), u))
            }
            _ => Err(unknown(name)),
        }
    }

    fn d_control_u_action(
        &self,
        _u: &[f64],
        _r: f64,
        th: &Controls,
        name: &str,
        z: &[f64],
    ) -> Result<Vec<f64>> {
        match name {
            "nu" => Ok(Core::rotate(z)),
            "l" => {
                let l = self.l(th);
                Ok(self.core.lap_apply(-2.0 / (l * l * l), z))
            }
            _ => Err(unknown(name)),
        }
    }

    fn inner_product(&self, x: &[f64], y: &[f64]) -> f64 {
        self.core.inner(x, y)
    }

    fn riesz(&self, c: &[f64]) -> Vec<f64> {
        c.iter().map(|x| self.core.weight * x).collect()
    }

    /// `(x + 2l, −x − 2l)` at every node.
    fn normalization(&self) -> Vec<f64> {
        let mut c = vec![0.0; 2 * self.n];
        for (i, x) in self.nodes().into_iter().enumerate() {
            c[2 * i] = x + 2.0 * self.l0;
            c[2 * i + 1] = -(x + 2.0 * self.l0);
        }
        c
    }
}
