//! Error type shared by every engine in the crate.

use thiserror::Error;

/// Everything that can go wrong when validating configurations or driving a
/// trajectory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A Pauli word must contain at least one site.
    #[error("empty Pauli word")]
    EmptyPauliWord,
    /// A Pauli word may only contain the characters `I`, `X`, `Y`, `Z`.
    #[error("invalid Pauli axis character {0:?}")]
    InvalidPauliAxis(char),
    /// Dense operators and states live on qubit registers.
    #[error("dimension {0} is not a positive power of two")]
    BadDimension(usize),
    /// Two objects that must act on the same register do not.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    /// A state or density matrix lost all of its weight (or became non-finite),
    /// so normalized quantities are undefined.
    #[error("degenerate norm: state weight is zero or non-finite")]
    DegenerateNorm,
    /// A scalar exponential left the representable range.
    #[error("scalar exponential overflow (real exponent {0})")]
    ExpOverflow(f64),
    /// A bridge was stepped past its pinning time.
    #[error("step past bridge endpoint: t = {t}, dt = {dt}, end = {t_end}")]
    PastEndpoint { t: f64, dt: f64, t_end: f64 },
    /// A configuration field failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    /// No attempt budget up to the stated bound meets the requested failure
    /// probability.
    #[error("infeasible budget: no attempt count up to {0} meets the target")]
    InfeasibleBudget(u32),
}

pub type Result<T> = core::result::Result<T, CoreError>;
