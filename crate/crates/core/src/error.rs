use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or command parameter failed validation.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "no circular orbit in bracket [{lo}, {hi}]: force-balance residuals {f_lo:e} and {f_hi:e} have the same sign"
    )]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last increment {last_increment:e})")]
    Convergence {
        what: String,
        iterations: usize,
        last_increment: f64,
    },

    #[error("{0}")]
    Precision(String),

    /// The requested operating point is outside the regime where a method applies.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("integration stopped at t = {t}: radius {r:e} fell below the guard {r_min:e}")]
    Collision { t: f64, r: f64, r_min: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by user input rather than by a solver.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}
