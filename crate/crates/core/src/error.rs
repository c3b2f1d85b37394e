use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("negative level index {0}")]
    NegativeIndex(i64),

    /// `εE + m` too close to zero for the coefficient relation to be used.
    #[error("coefficient relation singular: |εE + m| = {denominator:e} <= {tolerance:e}")]
    DenominatorSingular { denominator: f64, tolerance: f64 },

    #[error("ambiguous numerical rank: singular value {singular_value:e} within a factor 10 of cut {cut:e}")]
    IllConditioned { singular_value: f64, cut: f64 },

    #[error("level sum not converged after {levels} Landau levels")]
    ConvergenceFailure { levels: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
