use thiserror::Error;

/// Errors raised by the evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("integrand is singular on the integration domain (min of denominator = {min_denominator:e})")]
    SingularIntegrand { min_denominator: f64 },

    #[error("field point lies within the core cutoff of the filament (distance {distance:e} <= cutoff {cutoff:e})")]
    CoreProximity { distance: f64, cutoff: f64 },

    #[error("adaptive quadrature did not converge after {intervals} intervals (error estimate {error_estimate:e}, target {target:e})")]
    QuadratureNonconvergence {
        intervals: usize,
        error_estimate: f64,
        target: f64,
    },

    #[error("modulus too close to 1 for the differentiation formula (1 - k^2 = {complement:e})")]
    DegenerateModulus { complement: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
