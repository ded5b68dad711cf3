//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Errors are
//! never silently recovered from: truncation violations, convention drift
//! and overflow are hard failures by design.

use thiserror::Error;

/// Errors produced by exact q-character computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A node index fell outside the Cartan data.
    #[error("unknown node index {node} (rank {rank})")]
    UnknownNode { node: usize, rank: usize },

    /// A spectral index landed on the wrong parity component.
    #[error("parity violation: {0}")]
    Parity(String),

    /// Division by zero in the scalar field.
    #[error("division by zero")]
    DivisionByZero,

    /// Specialization of q to a forbidden or singular value.
    #[error("cannot specialize: {0}")]
    Specialize(String),

    /// An integer quantity exceeded its configured bound.
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    /// Integer overflow in series coefficients.
    #[error("coefficient overflow on {0}")]
    Overflow(String),

    /// An l-weight is not a product of Y, inverse Psi and weight factors.
    #[error("not a negative l-weight: {0}")]
    NotNegative(String),

    /// A q-power exponent that must be an integer was fractional.
    #[error("non-integral weight exponent: {0}")]
    NonIntegralWeight(String),

    /// A series coefficient was requested outside the tracked region.
    #[error("untracked region: {0}")]
    UntrackedRegion(String),

    /// A generator sequence failed to stabilize before the give-up bound.
    #[error("no stabilization after N = {nmax}")]
    NoStabilization { nmax: u32 },

    /// Mismatched sizes where equal cardinality is required.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// A module dimension exceeded the configured cap.
    #[error("dimension bound exceeded: {dim} > {cap}")]
    DimensionBound { dim: usize, cap: usize },

    /// An internal consistency relation failed, indicating convention drift.
    #[error("convention drift: {0}")]
    Inconsistency(String),

    /// An eigenvalue sequence matched no candidate l-weight.
    #[error("unmatched eigenvalue sequence: {0}")]
    UnmatchedEigenvalue(String),

    /// A truncated operation would have needed state outside the truncation.
    #[error("truncation too small: {0}")]
    Truncation(String),

    /// Joint diagonalization failed inside a truncation window.
    #[error("diagonalization failure: {0}")]
    Diagonalization(String),

    /// The rewriting step budget was exhausted.
    #[error("step budget exhausted after {steps} rewrites")]
    StepBudget { steps: u64 },

    /// Invalid run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True when the error describes malformed or out-of-contract input,
    /// as opposed to a failed computation or verification. Front ends use
    /// this to distinguish usage errors from genuine failures.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Config(_)
                | Error::NotNegative(_)
                | Error::Parity(_)
                | Error::UnknownNode { .. }
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
