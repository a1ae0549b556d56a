use thiserror::Error;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible (dimension mismatch, non-square input, ...).
    #[error("shape error: {0}")]
    Shape(String),

    /// An input violates a mathematical precondition of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result would exceed the configured dimension guard.
    #[error("size error: {0}")]
    Size(String),

    /// An iterative routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A matrix claimed to be a coupling does not satisfy the marginal or
    /// positivity requirements.
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    /// A Kraus family is not completely positive and trace preserving, or a
    /// channel does not map the prescribed input state to the prescribed output.
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// A transport problem is malformed (marginal traces differ, cost operator
    /// lives on the wrong space, ...).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// The requested construction is outside the supported structure
    /// (e.g. a multi-observable grid cost over a non-commuting collection).
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    /// The transport solver hit its iteration cap. Carries the best iterate
    /// found so far together with its residuals.
    #[error("solver did not converge within {iterations} iterations (primal {primal_residual:.3e}, dual {dual_residual:.3e}, gap {gap:.3e})")]
    NotConverged {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
        best: Box<crate::solver::TransportResult>,
    },

    /// Input file could not be parsed into a valid problem.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
