//! Run configuration: a sectioned `key = value` text format.
//!
//! ```text
//! # comment
//! [model]
//! name = fhn
//! c2 = 0.05
//!
//! [task]
//! mode = locate
//! lambda_min = 0.03
//! lambda_max = 0.07
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use hopfctl_core::control::ObjectiveKind;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `[section]` or `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section: [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key: {key} in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: key {key} appears twice in [{section}]")]
    Duplicate { line: usize, section: String, key: String },
    #[error("line {line}: key {key} outside of any section")]
    NoSection { line: usize, key: String },
    #[error("missing key: {0}")]
    Missing(&'static str),
    #[error("line {line}: invalid value for {key}: expected {expected}, found {found:?}")]
    Type {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continue,
    Locate,
    Control,
    Simulate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ModelConfig {
    Fhn {
        a: f64,
        b: f64,
        c1: f64,
        c2: f64,
        c3: f64,
    },
    Brusselator {
        a: f64,
    },
    Cgl2d {
        mu_cgl: f64,
        nu: f64,
        c3: f64,
        c5: f64,
        nx: usize,
        ny: usize,
        l1: f64,
        l2: f64,
    },
    Cgl1d {
        mu_cgl: f64,
        nu: f64,
        c3: f64,
        c5: f64,
        n: usize,
        l: f64,
    },
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fhn { .. } => "fhn",
            Self::Brusselator { .. } => "brusselator",
            Self::Cgl2d { .. } => "cgl2d",
            Self::Cgl1d { .. } => "cgl1d",
        }
    }

    pub fn controls(&self) -> &'static [&'static str] {
        match self {
            Self::Fhn { .. } => &["c2"],
            Self::Brusselator { .. } => &["a"],
            Self::Cgl2d { .. } => &["nu"],
            Self::Cgl1d { .. } => &["l", "nu"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveName {
    Location,
    Frequency,
}

impl From<ObjectiveName> for ObjectiveKind {
    fn from(o: ObjectiveName) -> Self {
        match o {
            ObjectiveName::Location => ObjectiveKind::Location,
            ObjectiveName::Frequency => ObjectiveKind::Frequency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskConfig {
    pub mode: Mode,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub steps: usize,
    pub k_eigs: usize,
    pub newton_tol: f64,
    pub newton_maxit: usize,
    pub hopf_tol: f64,
    pub hopf_maxit: usize,
    pub objective: Option<ObjectiveName>,
    pub target: Option<f64>,
    pub control: Option<String>,
    pub eps_j: f64,
    pub g_tol: f64,
    pub max_iter: usize,
    pub delta0: Option<f64>,
    pub delta_max: Option<f64>,
    pub eta: f64,
    pub branch_c: f64,
    pub bound_min: Option<f64>,
    pub bound_max: Option<f64>,
    pub lambda: Option<f64>,
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub sample_dt: f64,
    pub perturbation: f64,
    pub transient: f64,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub csv: bool,
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub task: TaskConfig,
    pub output: OutputConfig,
}

const MODEL_KEYS: &[&str] = &[
    "name", "a", "b", "c1", "c2", "c3", "c5", "mu_cgl", "nu", "nx", "ny", "l1", "l2", "n", "l",
];
const TASK_KEYS: &[&str] = &[
    "mode",
    "lambda_min",
    "lambda_max",
    "steps",
    "k_eigs",
    "newton_tol",
    "newton_maxit",
    "hopf_tol",
    "hopf_maxit",
    "objective",
    "target",
    "control",
    "eps_j",
    "g_tol",
    "max_iter",
    "delta0",
    "delta_max",
    "eta",
    "branch_c",
    "bound_min",
    "bound_max",
    "lambda",
    "t_end",
    "rtol",
    "atol",
    "sample_dt",
    "perturbation",
    "transient",
    "component",
];
const OUTPUT_KEYS: &[&str] = &["dir", "formats"];

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Raw entries of one section.
#[derive(Default)]
struct Section {
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn str(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some((v, line)) = self.str(key) else {
            return Ok(None);
        };
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(ConfigError::Type {
                line,
                key: key.into(),
                expected: "a finite real number",
                found: v,
            }),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let Some((v, line)) = self.str(key) else {
            return Ok(default);
        };
        v.parse::<usize>().map_err(|_| ConfigError::Type {
            line,
            key: key.into(),
            expected: "a non-negative integer",
            found: v,
        })
    }

    /// Reports the first key no reader asked for.
    fn reject_unused(&self, section: &str) -> Result<(), ConfigError> {
        match self.entries.iter().filter(|(_, e)| !e.used).min_by_key(|(_, e)| e.line) {
            Some((k, e)) => Err(ConfigError::UnknownKey {
                line: e.line,
                section: section.into(),
                key: k.clone(),
            }),
            None => Ok(()),
        }
    }
}

fn split(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            let known = [("model", MODEL_KEYS), ("task", TASK_KEYS), ("output", OUTPUT_KEYS)];
            if !known.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::UnknownSection {
                    line,
                    name: name.into(),
                });
            }
            sections.entry(name.into()).or_default();
            current = Some(name.into());
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.into(),
            });
        }
        let Some(section) = current.as_deref() else {
            return Err(ConfigError::NoSection { line, key: key.into() });
        };
        let allowed = match section {
            "model" => MODEL_KEYS,
            "task" => TASK_KEYS,
            _ => OUTPUT_KEYS,
        };
        if !allowed.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                section: section.into(),
                key: key.into(),
            });
        }
        let sec = sections.get_mut(section).expect("section registered above");
        if sec.entries.contains_key(key) {
            return Err(ConfigError::Duplicate {
                line,
                section: section.into(),
                key: key.into(),
            });
        }
        sec.entries.insert(
            key.into(),
            Entry {
                value: value.into(),
                line,
                used: false,
            },
        );
    }
    Ok(sections)
}

fn parse_model(sec: &mut Section) -> Result<ModelConfig, ConfigError> {
    let (name, line) = sec.str("name").unwrap_or(("fhn".into(), 0));
    let model = match name.as_str() {
        "fhn" => {
            let p = hopfctl_core::models::FhnParams::default();
            ModelConfig::Fhn {
                a: sec.f64_or("a", p.a)?,
                b: sec.f64_or("b", p.b)?,
                c1: sec.f64_or("c1", p.c1)?,
                c2: sec.f64_or("c2", p.c2)?,
                c3: sec.f64_or("c3", p.c3)?,
            }
        }
        "brusselator" => {
            let a = sec.f64_or("a", 1.0)?;
            if a <= 0.0 {
                return Err(ConfigError::Invalid("brusselator parameter a must be positive".into()));
            }
            ModelConfig::Brusselator { a }
        }
        "cgl2d" | "cgl1d" => {
            let p = hopfctl_core::models::CglParams::default();
            let (mu_cgl, nu, c3, c5) = (
                sec.f64_or("mu_cgl", p.mu_cgl)?,
                sec.f64_or("nu", p.nu)?,
                sec.f64_or("c3", p.c3)?,
                sec.f64_or("c5", p.c5)?,
            );
            if name == "cgl2d" {
                let m = ModelConfig::Cgl2d {
                    mu_cgl,
                    nu,
                    c3,
                    c5,
                    nx: sec.usize_or("nx", 32)?,
                    ny: sec.usize_or("ny", 16)?,
                    l1: sec.f64_or("l1", 1.0)?,
                    l2: sec.f64_or("l2", 0.5)?,
                };
                if let ModelConfig::Cgl2d { nx, ny, l1, l2, .. } = m {
                    if nx < 4 || ny < 4 {
                        return Err(ConfigError::Invalid("grid sizes nx, ny must be at least 4".into()));
                    }
                    if l1 <= 0.0 || l2 <= 0.0 {
                        return Err(ConfigError::Invalid("domain half-lengths must be positive".into()));
                    }
                }
                m
            } else {
                let n = sec.usize_or("n", 64)?;
                let l = sec.f64_or("l", 1.0)?;
                if n < 4 {
                    return Err(ConfigError::Invalid("grid size n must be at least 4".into()));
                }
                if l <= 0.0 {
                    return Err(ConfigError::Invalid("half-length l must be positive".into()));
                }
                ModelConfig::Cgl1d { mu_cgl, nu, c3, c5, n, l }
            }
        }
        other => {
            return Err(ConfigError::Type {
                line,
                key: "name".into(),
                expected: "one of fhn, brusselator, cgl2d, cgl1d",
                found: other.into(),
            })
        }
    };
    sec.reject_unused("model")?;
    Ok(model)
}

fn parse_mode(sec: &mut Section) -> Result<Mode, ConfigError> {
    let (v, line) = sec.str("mode").ok_or(ConfigError::Missing("mode"))?;
    Ok(match v.as_str() {
        "continue" => Mode::Continue,
        "locate" => Mode::Locate,
        "control" => Mode::Control,
        "simulate" => Mode::Simulate,
        _ => {
            return Err(ConfigError::Type {
                line,
                key: "mode".into(),
                expected: "one of continue, locate, control, simulate",
                found: v,
            })
        }
    })
}

fn parse_task(sec: &mut Section, model: &ModelConfig) -> Result<TaskConfig, ConfigError> {
    let mode = parse_mode(sec)?;
    let objective = match sec.str("objective") {
        None => None,
        Some((v, line)) => Some(match v.as_str() {
            "location" => ObjectiveName::Location,
            "frequency" => ObjectiveName::Frequency,
            _ => {
                return Err(ConfigError::Type {
                    line,
                    key: "objective".into(),
                    expected: "location or frequency",
                    found: v,
                })
            }
        }),
    };
    let control = match sec.str("control") {
        None => None,
        Some((v, line)) => {
            if !model.controls().contains(&v.as_str()) {
                return Err(ConfigError::Type {
                    line,
                    key: "control".into(),
                    expected: "a control of the selected model",
                    found: v,
                });
            }
            Some(v)
        }
    };
    let task = TaskConfig {
        mode,
        lambda_min: sec.f64("lambda_min")?,
        lambda_max: sec.f64("lambda_max")?,
        steps: sec.usize_or("steps", 41)?,
        k_eigs: sec.usize_or("k_eigs", hopfctl_core::steady::DEFAULT_K_EIGS)?,
        newton_tol: sec.f64_or("newton_tol", 1e-10)?,
        newton_maxit: sec.usize_or("newton_maxit", 50)?,
        hopf_tol: sec.f64_or("hopf_tol", 1e-10)?,
        hopf_maxit: sec.usize_or("hopf_maxit", 50)?,
        objective,
        target: sec.f64("target")?,
        control,
        eps_j: sec.f64_or("eps_j", 1e-10)?,
        g_tol: sec.f64_or("g_tol", 1e-8)?,
        max_iter: sec.usize_or("max_iter", 100)?,
        delta0: sec.f64("delta0")?,
        delta_max: sec.f64("delta_max")?,
        eta: sec.f64_or("eta", 0.1)?,
        branch_c: sec.f64_or("branch_c", 0.5)?,
        bound_min: sec.f64("bound_min")?,
        bound_max: sec.f64("bound_max")?,
        lambda: sec.f64("lambda")?,
        t_end: sec.f64_or("t_end", 1000.0)?,
        rtol: sec.f64_or("rtol", 1e-8)?,
        atol: sec.f64_or("atol", 1e-10)?,
        sample_dt: sec.f64_or("sample_dt", 1.0)?,
        perturbation: sec.f64_or("perturbation", 0.01)?,
        transient: sec.f64_or("transient", 0.5)?,
        component: sec.usize_or("component", 0)?,
    };
    sec.reject_unused("task")?;
    Ok(task)
}

fn require(task: &mut TaskConfig, model: &ModelConfig) -> Result<(), ConfigError> {
    let need = |v: bool, key: &'static str| if v { Ok(()) } else { Err(ConfigError::Missing(key)) };
    if task.mode == Mode::Control {
        need(task.objective.is_some(), "objective")?;
        need(task.target.is_some(), "target")?;
        need(task.control.is_some(), "control")?;
        if task.target == Some(0.0) {
            return Err(ConfigError::Invalid("target must be nonzero".into()));
        }
    }
    match task.mode {
        Mode::Continue | Mode::Locate | Mode::Control => {
            need(task.lambda_min.is_some(), "lambda_min")?;
            need(task.lambda_max.is_some(), "lambda_max")?;
            if task.lambda_min >= task.lambda_max {
                return Err(ConfigError::Invalid("lambda_min must be below lambda_max".into()));
            }
            if task.steps < 2 {
                return Err(ConfigError::Invalid("steps must be at least 2".into()));
            }
            if task.k_eigs == 0 {
                return Err(ConfigError::Invalid("k_eigs must be positive".into()));
            }
        }
        Mode::Simulate => {
            if task.lambda.is_none() {
                match model {
                    ModelConfig::Fhn { c1, .. } => task.lambda = Some(*c1),
                    _ => return Err(ConfigError::Missing("lambda")),
                }
            }
            if !(task.t_end > 0.0 && task.sample_dt > 0.0 && task.rtol > 0.0 && task.atol > 0.0) {
                return Err(ConfigError::Invalid("t_end, sample_dt, rtol and atol must be positive".into()));
            }
            if !(0.0..1.0).contains(&task.transient) {
                return Err(ConfigError::Invalid("transient must lie in [0, 1)".into()));
            }
        }
    }
    if !(task.newton_tol > 0.0 && task.hopf_tol > 0.0) {
        return Err(ConfigError::Invalid("solver tolerances must be positive".into()));
    }
    Ok(())
}

fn parse_output(sec: Option<&mut Section>) -> Result<OutputConfig, ConfigError> {
    let mut out = OutputConfig {
        dir: None,
        csv: true,
        json: true,
    };
    let Some(sec) = sec else {
        return Ok(out);
    };
    out.dir = sec.str("dir").map(|(d, _)| PathBuf::from(d));
    if let Some((v, line)) = sec.str("formats") {
        out.csv = false;
        out.json = false;
        for f in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match f {
                "csv" => out.csv = true,
                "json" => out.json = true,
                _ => {
                    return Err(ConfigError::Type {
                        line,
                        key: "formats".into(),
                        expected: "a comma-separated list of csv, json",
                        found: v,
                    })
                }
            }
        }
    }
    sec.reject_unused("output")?;
    Ok(out)
}

/// Parses and validates a configuration, filling in defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut sections = split(text)?;
    let mut empty = Section::default();
    let model = parse_model(sections.get_mut("model").unwrap_or(&mut empty))?;
    let mut task = match sections.get_mut("task") {
        Some(sec) => parse_task(sec, &model)?,
        None => return Err(ConfigError::Missing("mode")),
    };
    require(&mut task, &model)?;
    let output = parse_output(sections.get_mut("output"))?;
    Ok(RunConfig { model, task, output })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_locate() {
        let cfg = parse_config("[model]\nname=fhn\n[task]\nmode=locate\nlambda_min=0.03\nlambda_max=0.07").unwrap();
        assert_eq!(cfg.task.mode, Mode::Locate);
        assert_eq!(cfg.task.lambda_min, Some(0.03));
        assert_eq!(cfg.task.steps, 41);
        assert!(matches!(cfg.model, ModelConfig::Fhn { c2, .. } if c2 == 0.05));
    }

    #[test]
    fn control_without_objective() {
        let err = parse_config("[task]\nmode=control").unwrap_err();
        assert_eq!(err.to_string(), "missing key: objective");
    }

    #[test]
    fn type_mismatch_names_line() {
        let err = parse_config("[model]\nname = fhn\n\n[task]\nmode = locate\nlambda_min = abc\nlambda_max = 1").unwrap_err();
        assert!(matches!(err, ConfigError::Type { line: 6, .. }), "{err}");
        assert!(err.to_string().starts_with("line 6:"));
    }

    #[test]
    fn unknown_names_reported() {
        let err = parse_config("[mdl]\nname=fhn").unwrap_err();
        assert!(err.to_string().contains("unknown section: [mdl]"));
        let err = parse_config("[task]\nmode=locate\nlamda_min=1").unwrap_err();
        assert!(err.to_string().contains("unknown key: lamda_min"));
        // keys of another model
        let err = parse_config("[model]\nname=fhn\nnx=8\n[task]\nmode=locate\nlambda_min=0\nlambda_max=1").unwrap_err();
        assert!(err.to_string().contains("unknown key: nx in [model]"), "{err}");
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# run\n[model]   # the model\n  name = brusselator\n a = 2 # override\n[task]\nmode=locate\nlambda_min=4\nlambda_max=6\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.model, ModelConfig::Brusselator { a: 2.0 });
    }

    #[test]
    fn non_finite_rejected() {
        let err = parse_config("[task]\nmode=locate\nlambda_min=nan\nlambda_max=1").unwrap_err();
        assert!(matches!(err, ConfigError::Type { line: 3, .. }));
    }

    #[test]
    fn keys_are_case_sensitive() {
        assert!(parse_config("[task]\nMode=locate").is_err());
    }

    #[test]
    fn formats_list() {
        let cfg = parse_config("[task]\nmode=simulate\n[output]\nformats = csv").unwrap();
        assert!(cfg.output.csv && !cfg.output.json);
        assert_eq!(cfg.task.lambda, Some(0.15));
    }
}
