use alloc::string::String;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular to working precision at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not converge ({converged} eigenvalues converged)")]
    EigenNoConvergence { converged: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("unknown control parameter `{0}`")]
    UnknownControl(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("no Hopf candidate on branch")]
    NoHopfCandidate,

    #[error("normalization function orthogonal to eigenfunction")]
    NormalizationOrthogonal,

    #[error("non-regular Hopf point: extended Jacobian is singular")]
    NonRegularHopf,

    #[error("frequency changed sign more than once during the Hopf solve")]
    FrequencySignFlip,

    #[error("Hopf verification failed: iμ is {gap:e} away from the nearest eigenvalue")]
    EigenGap { gap: f64 },

    #[error("deflated Newton converged to known solution {index}")]
    ConvergedToKnown { index: usize },

    #[error("optimization stalled: trust radius {radius:e} below threshold")]
    OptimizationStalled { radius: f64 },

    #[error("no sustained oscillation ({crossings} upward crossings)")]
    NoOscillation { crossings: usize },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
