//! Artifact writers. Floats are written in their shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use hopfctl_core::control::OptimizationLog;
use hopfctl_core::hopf::HopfPoint;
use hopfctl_core::steady::ContinuationTrace;
use hopfctl_core::timeint::Trajectory;
use hopfctl_core::DynamicalSystem;
use serde_json::{json, Value};

/// Shortest decimal string that parses back to `x`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn row(out: &mut String, fields: impl IntoIterator<Item = String>) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        out.push_str(&f);
        first = false;
    }
    out.push('\n');
}

/// `lambda,norm_u,re_eig_0,im_eig_0,...` with one row per branch point.
pub fn trace_csv(sys: &dyn DynamicalSystem, trace: &ContinuationTrace, k_eigs: usize) -> String {
    let mut out = String::new();
    let mut header = vec!["lambda".to_string(), "norm_u".to_string()];
    for i in 0..k_eigs {
        header.push(format!("re_eig_{i}"));
        header.push(format!("im_eig_{i}"));
    }
    row(&mut out, header);
    for p in &trace.points {
        let mut fields = vec![num(p.lambda), num(sys.norm(&p.u))];
        for i in 0..k_eigs {
            match p.eigs.get(i) {
                Some(e) => {
                    fields.push(num(e.value.re));
                    fields.push(num(e.value.im));
                }
                None => fields.extend([String::new(), String::new()]),
            }
        }
        row(&mut out, fields);
    }
    out
}

pub fn optlog_csv(log: &OptimizationLog) -> String {
    let mut out = String::from("iter,accepted,theta,J,lambda,mu,radius\n");
    for e in &log.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.iter,
            u8::from(e.accepted),
            num(e.theta),
            num(e.j),
            num(e.lambda),
            num(e.mu),
            num(e.radius)
        );
    }
    out
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    let dim = traj.states.first().map_or(0, Vec::len);
    row(&mut out, std::iter::once("t".to_string()).chain((0..dim).map(|i| format!("u{i}"))));
    for (t, y) in traj.times.iter().zip(&traj.states) {
        row(&mut out, std::iter::once(num(*t)).chain(y.iter().map(|x| num(*x))));
    }
    out
}

/// Finite floats as JSON numbers, anything else as `null`.
pub fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn hopf_json(sys: &dyn DynamicalSystem, hp: &HopfPoint) -> Value {
    let s = &hp.state;
    json!({
        "model": sys.name(),
        "lambda_name": sys.lambda_name(),
        "lambda": jnum(hp.lambda()),
        "mu": jnum(hp.mu()),
        "period": jnum(hp.period()),
        "residual": jnum(hp.residual),
        "eig_gap": jnum(hp.eig_gap),
        "iterations": hp.iterations,
        "u": s.u,
        "v": s.v,
        "w": s.w,
    })
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> io::Result<()> {
    fs::write(dir.join(name), text)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(dir.join(name), text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_format() {
        for x in [0.1, 1.0 / 3.0, 1e-20, 277.30, -0.0504167] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.05), "0.05");
        assert_eq!(jnum(f64::NAN), Value::Null);
    }
}
