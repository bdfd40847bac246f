use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    /// Carries the last estimate and its error bound.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    /// Velocity field evaluated on the polar axis with m != 0.
    #[error("singular point: {0}")]
    Singularity(String),

    /// Quantum potential requested on (or too close to) a nodal surface.
    #[error("nodal surface: {0}")]
    Node(String),

    /// No closed form is available for the requested state.
    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    /// A Gamma-function argument hit a non-positive integer.
    #[error("gamma pole: {0}")]
    Pole(String),

    /// Sampled spectrum ends before the asymptotic regime needed for a moment.
    #[error("insufficient coverage: {0}")]
    InsufficientCoverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
