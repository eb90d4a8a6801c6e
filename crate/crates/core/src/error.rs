use thiserror::Error;

/// Failures of the simulation models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("channel matrix is rank deficient (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("sum-capacity iteration stopped after {iterations} iterations (duality gap {residual:e} bits/s/Hz)")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("zero-forcing residual {residual:e} exceeds tolerance")]
    ZeroForcingResidual { residual: f64 },

    #[error("user {user} lies outside every beam of the coverage layout")]
    OutsideCoverage { user: usize },

    #[error("secondary beam {beam} has no parent primary beam")]
    OrphanBeam { beam: usize },

    #[error("beam adjacency graph cannot be colored with {colors} slots")]
    NotColorable { colors: usize },

    #[error("pattern does not match layout: {0}")]
    PatternMismatch(&'static str),

    #[error("rate {0} is negative")]
    NegativeRate(f64),

    #[error("all rates are zero; the fairness index is undefined")]
    AllZeroRates,

    #[error("scheduling pool is empty")]
    EmptyPool,
}

impl Error {
    /// Errors that a Monte Carlo driver should handle by redrawing the drop.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. } | Error::NonConvergence { .. } | Error::ZeroForcingResidual { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
