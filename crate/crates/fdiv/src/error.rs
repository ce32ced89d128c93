//! Crate-wide error type.

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A divergence name that is not in the builtin catalog.
    #[error("unknown divergence '{0}'")]
    UnknownDivergence(String),

    /// Invalid argument to a catalog operation (bad scale factor, bad
    /// combination weights, ratio at the excluded point, ...).
    #[error("invalid catalog operation: {0}")]
    Catalog(String),

    /// A distribution constructor rejected its input.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Two distributions of different kinds (discrete vs continuous) were
    /// passed where a common support is required.
    #[error("mixed distribution kinds: {0}")]
    MixedKinds(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Integration(String),

    /// A critic evaluation produced a non-finite bound term.
    #[error("non-finite bound term at critic value d = {d}")]
    Evaluation { d: f64 },

    /// Invalid argument to an estimator or trainer routine.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Training aborted because a parameter left the trust region.
    #[error("training diverged at step {step}: {detail}")]
    Diverged { step: usize, detail: String },

    /// The generator does not support the requested gradient path.
    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    /// The pushforward has no density (rank-deficient covariance).
    #[error("degenerate pushforward: {0}")]
    DegenerateSupport(String),

    /// I/O failure in the CLI layer.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON descriptor or config.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
