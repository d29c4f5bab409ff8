//! Error type shared by all modules.

/// Failure modes surfaced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument was NaN or infinite.
    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    /// An argument was outside its documented domain.
    #[error("{name} = {value} out of domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Matrix or vector dimensions do not match the operation's contract.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A pivot fell below the singularity threshold during inversion.
    #[error("singular matrix: pivot magnitude {0:.3e} below threshold")]
    SingularMatrix(f64),

    /// Training mode was requested without training symbols.
    #[error("training mode requires training symbols")]
    MissingTrainingSymbols,

    /// A quantity that is provably non-negative came out negative.
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),

    /// Multi-bit PSK correlation factors are gated behind an explicit
    /// opt-in; see `analysis::psk_correlation_factor`.
    #[error("multi-bit PSK correlation factor requires the experimental flag")]
    ExperimentalFeature,
}
