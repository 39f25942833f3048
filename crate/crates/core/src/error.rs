use thiserror::Error;

/// Errors produced by the simulation engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config key `{key}`: {message}")]
    InvalidField { key: String, message: String },

    #[error("missing required config key `{0}`")]
    MissingField(String),

    #[error("unknown config key `{0}`")]
    UnknownField(String),

    #[error("exactly one of {0} must be given")]
    Exclusive(String),

    #[error("integrator step size underflow at t = {t:e} s")]
    StepUnderflow { t: f64 },

    #[error("integrator produced a non-finite state at t = {t:e} s: {state:?}")]
    NonFinite { t: f64, state: Vec<f64> },

    #[error("integrator exceeded {steps} steps at t = {t:e} s")]
    MaxSteps { t: f64, steps: usize },

    #[error("invalid integrator tolerance {0:e}; must lie in (0, 1e-3]")]
    Tolerance(f64),

    #[error("no steady state found: {0}")]
    NoSteadyState(String),

    #[error("eigenvalue solver did not converge for matrix {0:?}")]
    EigenFailure(Vec<f64>),

    #[error("drift matrix is marginally stable (spectral abscissa {abscissa:e} rad/s); Lyapunov equation is singular")]
    Marginal { abscissa: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("critical temperature search does not bracket: EN = {en_lo:e} at {t_lo} K, EN = {en_hi:e} at {t_hi} K")]
    NotBracketed {
        t_lo: f64,
        en_lo: f64,
        t_hi: f64,
        en_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
