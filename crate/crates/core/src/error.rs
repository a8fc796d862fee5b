use thiserror::Error;

/// Errors raised by the numerics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("function is not normalized: integral {integral} (tolerance {tolerance:e})")]
    NormalizationViolation { integral: f64, tolerance: f64 },

    #[error("second moment does not converge")]
    DivergentMoment,

    #[error("covariance matrix is not positive definite (g_xx = {g_xx}, det = {det})")]
    NotPositiveDefinite { g_xx: f64, det: f64 },

    #[error("linear system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("function is negative on its support: W({r}) = {value:e}")]
    NegativityDetected { r: f64, value: f64 },

    #[error("no sign change of the residual on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no extremal solution with mu_ex = {mu} exists for mu_g = {mu_g}")]
    NoSolution { mu: f64, mu_g: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
