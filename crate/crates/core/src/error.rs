use thiserror::Error;

use crate::correlation::CorrelationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the impact law, the cost model and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("{what} must be {expected}, got {value}")]
    Domain {
        what: &'static str,
        expected: &'static str,
        value: f64,
    },

    #[error("schedule has {got} entries but the portfolio has {expected} assets")]
    Misaligned { expected: usize, got: usize },

    #[error(transparent)]
    Correlation(#[from] CorrelationError),

    /// The impact inversion failed to reach its tolerance.
    #[error("impact inversion did not converge after {iterations} iterations (volume {volume})")]
    NoConvergence { iterations: usize, volume: f64 },

    /// The cost became NaN or infinite while searching a coordinate.
    #[error("non-finite cost for asset {asset} at T = {time} days")]
    NonFinite { asset: usize, time: f64 },

    #[error("invalid optimizer configuration: {0}")]
    Config(&'static str),
}

impl Error {
    pub(crate) fn domain(what: &'static str, expected: &'static str, value: f64) -> Self {
        Error::Domain {
            what,
            expected,
            value,
        }
    }
}
