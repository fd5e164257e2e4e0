//! The model interface and finite-difference validation of its derivatives.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, SparseMatrix};

/// Named scalar control parameters θ. Missing entries fall back to the
/// model's own defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Controls(BTreeMap<String, f64>);

impl Controls {
    pub fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn get_or(&self, name: &str, default: f64) -> f64 {
        self.get(name).unwrap_or(default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A parameterized system `du/dt = F(u, λ; θ)` with analytic derivatives.
///
/// `hessian_action(u, λ, θ, z)` is the matrix of the map `y ↦ F_uu[z, y]`,
/// i.e. the derivative of `u ↦ F_u(u, λ) z`.
pub trait DynamicalSystem {
    fn dim(&self) -> usize;
    fn name(&self) -> &str;
    /// Name of the bifurcation parameter λ.
    fn lambda_name(&self) -> &str;
    fn control_names(&self) -> Vec<&'static str>;
    /// Effective value of every control, including defaults.
    fn default_controls(&self) -> Controls;

    fn residual(&self, u: &[f64], lambda: f64, th: &Controls) -> Vec<f64>;
    fn jacobian(&self, u: &[f64], lambda: f64, th: &Controls) -> SparseMatrix;
    fn d_lambda(&self, u: &[f64], lambda: f64, th: &Controls) -> Vec<f64>;
    fn hessian_action(&self, u: &[f64], lambda: f64, th: &Controls, z: &[f64]) -> SparseMatrix;
    fn d_lambda_u_action(&self, u: &[f64], lambda: f64, th: &Controls, z: &[f64]) -> Vec<f64>;
    fn d_control(&self, u: &[f64], lambda: f64, th: &Controls, name: &str) -> Result<Vec<f64>>;
    fn d_control_u_action(
        &self,
        u: &[f64],
        lambda: f64,
        th: &Controls,
        name: &str,
        z: &[f64],
    ) -> Result<Vec<f64>>;

    fn inner_product(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, y)
    }

    /// Coefficients `r` with `⟨c, y⟩ = Σ r_j y_j` for every `y`.
    fn riesz(&self, c: &[f64]) -> Vec<f64> {
        let mut e = vec![0.0; c.len()];
        (0..c.len())
            .map(|j| {
                e[j] = 1.0;
                let r = self.inner_product(c, &e);
                e[j] = 0.0;
                r
            })
            .collect()
    }

    /// Default normalization function for the Hopf solve.
    fn normalization(&self) -> Vec<f64>;

    fn norm(&self, x: &[f64]) -> f64 {
        libm::sqrt(self.inner_product(x, x).max(0.0))
    }

    /// Rejects control names the model does not know.
    fn check_controls(&self, th: &Controls) -> Result<()> {
        let known = self.control_names();
        for (name, value) in th.iter() {
            if !known.contains(&name) {
                return Err(Error::UnknownControl(name.to_string()));
            }
            if !value.is_finite() {
                return Err(Error::NonFinite("control"));
            }
        }
        Ok(())
    }
}

/// Max relative discrepancy of each analytic derivative against central
/// differences. A non-finite difference quotient is reported as infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub jacobian: f64,
    pub d_lambda: f64,
    pub hessian_action: f64,
    pub d_lambda_u_action: f64,
    pub d_control: Vec<(String, f64)>,
    pub d_control_u_action: Vec<(String, f64)>,
}

impl FdReport {
    /// Largest error over all first-order derivatives.
    pub fn first_order(&self) -> f64 {
        let mut e = self.jacobian.max(self.d_lambda);
        for (_, v) in &self.d_control {
            e = e.max(*v);
        }
        e
    }

    /// Largest error over all second-order (mixed) derivatives.
    pub fn second_order(&self) -> f64 {
        let mut e = self.hessian_action.max(self.d_lambda_u_action);
        for (_, v) in &self.d_control_u_action {
            e = e.max(*v);
        }
        e
    }

    pub fn passes(&self, first_tol: f64, second_tol: f64) -> bool {
        self.first_order() <= first_tol && self.second_order() <= second_tol
    }
}

/// Step used by [`fd_validate`] when the caller has no preference.
pub fn default_fd_step(u: &[f64]) -> f64 {
    (1e-7 * (1.0 + norm_inf(u))).max(1e-6)
}

fn rel_err(analytic: &[f64], fd: &[f64]) -> f64 {
    if fd.iter().any(|x| !x.is_finite()) {
        return f64::INFINITY;
    }
    let scale = norm_inf(analytic).max(norm_inf(fd));
    let diff = analytic
        .iter()
        .zip(fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if diff == 0.0 {
        0.0
    } else {
        diff / (scale + 1e-8)
    }
}

fn central(plus: &[f64], minus: &[f64], h: f64) -> Vec<f64> {
    plus.iter()
        .zip(minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect()
}

fn shifted(u: &[f64], z: &[f64], t: f64) -> Vec<f64> {
    u.iter().zip(z).map(|(a, b)| a + t * b).collect()
}

/// Deterministic probe direction used for the action checks.
fn probe(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| libm::sin(0.7 + 1.3 * i as f64) + 0.25)
        .collect()
}

/// Compares every analytic derivative of `sys` at `(u, λ, θ)` with central
/// differences of step `step`.
pub fn fd_validate<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u: &[f64],
    lambda: f64,
    th: &Controls,
    step: f64,
) -> Result<FdReport> {
    let n = sys.dim();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let h = step;

    // F_u, column by column
    let jac = sys.jacobian(u, lambda, th).to_dense();
    let mut jac_err = 0.0f64;
    {
        let mut fd_cols = vec![0.0; n * n];
        let mut up = u.to_vec();
        for j in 0..n {
            up[j] = u[j] + h;
            let fp = sys.residual(&up, lambda, th);
            up[j] = u[j] - h;
            let fm = sys.residual(&up, lambda, th);
            up[j] = u[j];
            for i in 0..n {
                fd_cols[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac_err = jac_err.max(rel_err(jac.as_slice(), &fd_cols));
    }

    let fd_l = central(
        &sys.residual(u, lambda + h, th),
        &sys.residual(u, lambda - h, th),
        h,
    );
    let dl_err = rel_err(&sys.d_lambda(u, lambda, th), &fd_l);

    let z = probe(n);
    let jp = sys.jacobian(&shifted(u, &z, h), lambda, th).to_dense();
    let jm = sys.jacobian(&shifted(u, &z, -h), lambda, th).to_dense();
    let fd_h = central(jp.as_slice(), jm.as_slice(), h);
    let hess = sys.hessian_action(u, lambda, th, &z).to_dense();
    let hess_err = rel_err(hess.as_slice(), &fd_h);

    let fd_lu = central(
        &sys.jacobian(u, lambda + h, th).matvec(&z),
        &sys.jacobian(u, lambda - h, th).matvec(&z),
        h,
    );
    let dlu_err = rel_err(&sys.d_lambda_u_action(u, lambda, th, &z), &fd_lu);

    let base = sys.default_controls();
    let mut dc = Vec::new();
    let mut dcu = Vec::new();
    for name in sys.control_names() {
        let t0 = th.get(name).or_else(|| base.get(name)).unwrap_or(0.0);
        let ht = (1e-7 * (1.0 + t0.abs())).max(h);
        let tp = th.clone().with(name, t0 + ht);
        let tm = th.clone().with(name, t0 - ht);
        let fd = central(&sys.residual(u, lambda, &tp), &sys.residual(u, lambda, &tm), ht);
        dc.push((name.to_string(), rel_err(&sys.d_control(u, lambda, th, name)?, &fd)));
        let fd = central(
            &sys.jacobian(u, lambda, &tp).matvec(&z),
            &sys.jacobian(u, lambda, &tm).matvec(&z),
            ht,
        );
        dcu.push((
            name.to_string(),
            rel_err(&sys.d_control_u_action(u, lambda, th, name, &z)?, &fd),
        ));
    }

    Ok(FdReport {
        jacobian: jac_err,
        d_lambda: dl_err,
        hessian_action: hess_err,
        d_lambda_u_action: dlu_err,
        d_control: dc,
        d_control_u_action: dcu,
    })
}
