//! Dormand–Prince 5(4) with dense output, and period estimation from
//! zero crossings.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::system::{Controls, DynamicalSystem};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct Rk45Options {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the dense-output samples; `None` records every step.
    pub sample_dt: Option<f64>,
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for Rk45Options {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            sample_dt: None,
            h0: None,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Accepted step sizes.
    pub steps: Vec<f64>,
    /// Scaled error estimate of each accepted step (≤ 1).
    pub errors: Vec<f64>,
    pub rejected: usize,
}

impl Trajectory {
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }
}

fn combine(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += h * c * ki;
        }
    }
    out
}

/// Integrates `y' = f(t, y)` over `span`.
pub fn rk45_fn(
    mut f: impl FnMut(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    span: (f64, f64),
    opts: Rk45Options,
) -> Result<Trajectory> {
    let (t0, t1) = span;
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive"));
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument("time span must be increasing and finite"));
    }
    if let Some(dt) = opts.sample_dt {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("sample spacing must be positive"));
        }
    }
    let n = y0.len();
    let len = t1 - t0;
    let h_min = 1e-12 * len;
    let scale = |a: &[f64], b: &[f64], i: usize| opts.atol + opts.rtol * a[i].abs().max(b[i].abs());

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f(t, &y);

    let mut h = match opts.h0 {
        Some(h) => h,
        None => {
            let d0 = libm::sqrt(
                (0..n).map(|i| (y[i] / scale(&y, &y, i)).powi(2)).sum::<f64>() / n.max(1) as f64,
            );
            let d1 = libm::sqrt(
                (0..n).map(|i| (k1[i] / scale(&y, &y, i)).powi(2)).sum::<f64>() / n.max(1) as f64,
            );
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6 * len.max(1.0)
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(len);

    let mut traj = Trajectory::default();
    traj.times.push(t);
    traj.states.push(y.clone());
    let mut next_sample = opts.sample_dt.map(|dt| (1usize, dt));

    let mut accepted = 0usize;
    while t < t1 {
        if accepted + traj.rejected >= opts.max_steps {
            return Err(Error::NoConvergence {
                iterations: opts.max_steps,
                residual: t1 - t,
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = combine(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y1);

        let mut err = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let s = scale(&y, &y1, i);
            err += (e / s) * (e / s);
        }
        let err = libm::sqrt(err / n.max(1) as f64);
        if !err.is_finite() {
            h *= 0.2;
            traj.rejected += 1;
            if h < h_min {
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            match next_sample.as_mut() {
                Some((idx, dt)) => {
                    // dense output on [t, t + h]
                    let ydiff: Vec<f64> = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
                    let bspl: Vec<f64> = (0..n).map(|i| h * k1[i] - ydiff[i]).collect();
                    let rc4: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
                    let rc5: Vec<f64> = (0..n)
                        .map(|i| {
                            h * (D1 * k1[i]
                                + D3 * k3[i]
                                + D4 * k4[i]
                                + D5 * k5[i]
                                + D6 * k6[i]
                                + D7 * k7[i])
                        })
                        .collect();
                    loop {
                        let ts = t0 + *idx as f64 * *dt;
                        if ts > t_new || ts > t1 {
                            break;
                        }
                        let th = (ts - t) / h;
                        let th1 = 1.0 - th;
                        let ys: Vec<f64> = (0..n)
                            .map(|i| {
                                y[i] + th
                                    * (ydiff[i]
                                        + th1 * (bspl[i] + th * (rc4[i] + th1 * rc5[i])))
                            })
                            .collect();
                        traj.times.push(ts);
                        traj.states.push(ys);
                        *idx += 1;
                    }
                }
                None => {
                    traj.times.push(t_new);
                    traj.states.push(y1.clone());
                }
            }
            traj.steps.push(h);
            traj.errors.push(err);
            accepted += 1;
            t = t_new;
            y = y1;
            k1 = k7;
            h *= factor;
        } else {
            traj.rejected += 1;
            h *= factor.min(1.0);
        }
        if t < t1 && h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
    }
    // make sure the end point is present when sampling on a grid
    if opts.sample_dt.is_some() && traj.times.last().is_some_and(|&tl| tl < t1) {
        traj.times.push(t1);
        traj.states.push(y);
    }
    Ok(traj)
}

/// Integrates `du/dt = F(u, λ; θ)` over `span`.
pub fn rk45<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u0: &[f64],
    lambda: f64,
    th: &Controls,
    span: (f64, f64),
    opts: Rk45Options,
) -> Result<Trajectory> {
    if u0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: u0.len(),
        });
    }
    rk45_fn(|_, y| sys.residual(y, lambda, th), u0, span, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Standard deviation of the individual cycle lengths.
    pub std_dev: f64,
    pub crossings: usize,
}

/// Mean spacing of upward zero crossings of the mean-removed signal after
/// discarding the leading `transient` fraction of the time span.
pub fn estimate_period(traj: &Trajectory, component: usize, transient: f64) -> Result<PeriodEstimate> {
    estimate_period_samples(&traj.times, &traj.component(component), transient)
}

/// [`estimate_period`] on raw samples.
pub fn estimate_period_samples(times: &[f64], values: &[f64], transient: f64) -> Result<PeriodEstimate> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: values.len(),
        });
    }
    if !(0.0..1.0).contains(&transient) {
        return Err(Error::InvalidArgument("transient fraction must lie in [0, 1)"));
    }
    if times.len() < 2 {
        return Err(Error::NoOscillation { crossings: 0 });
    }
    let t_cut = times[0] + transient * (times[times.len() - 1] - times[0]);
    let start = times.iter().position(|&t| t >= t_cut).unwrap_or(times.len());
    let (ts, xs) = (&times[start..], &values[start..]);
    if ts.len() < 2 {
        return Err(Error::NoOscillation { crossings: 0 });
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let mut crossings = Vec::new();
    for i in 1..xs.len() {
        let (a, b) = (xs[i - 1] - mean, xs[i] - mean);
        if a < 0.0 && b >= 0.0 {
            let s = -a / (b - a);
            crossings.push(ts[i - 1] + s * (ts[i] - ts[i - 1]));
        }
    }
    if crossings.len() < 3 {
        return Err(Error::NoOscillation {
            crossings: crossings.len(),
        });
    }
    let periods: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let m = periods.iter().sum::<f64>() / periods.len() as f64;
    let var = periods.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / periods.len() as f64;
    Ok(PeriodEstimate {
        period: m,
        std_dev: libm::sqrt(var),
        crossings: crossings.len(),
    })
}

/// Deterministic small perturbation helper for simulations started next to a
/// steady state.
pub fn perturbed(u: &[f64], index: usize, amount: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    if let Some(x) = v.get_mut(index) {
        *x += amount;
    }
    v
}
