use thiserror::Error;

/// Errors raised by the geometry, simulation and analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or quadrature failed to reach its requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A configuration value violates its documented invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A per-sample geometric inequality failed on a simulated path.
    #[error("sandwich violation ({kind}) at seed {seed}, replicate {replicate}, n_steps {n_steps}")]
    SandwichViolation { kind: String, seed: u64, replicate: u64, n_steps: usize },

    /// A computed chain of bounds came out in the wrong order.
    #[error("bound ordering violated: {0}")]
    Ordering(String),
}

pub type Result<T> = std::result::Result<T, Error>;
