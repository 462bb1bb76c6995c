use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The parameters fall outside the regime an operation is defined for.
    /// `violated` is the offending inequality, e.g. `"epsilon >= kappa/2"`.
    #[error("outside the valid regime: {violated}")]
    Regime { violated: &'static str },

    /// A closed-form expression would divide by zero or is otherwise undefined.
    #[error("domain error: {0}")]
    Domain(String),

    /// `critical_gamma_c` at epsilon = 0, where the root degenerates to zero.
    #[error("degenerate critical coupling: epsilon = 0 gives gamma_c* = 0")]
    DegenerateCritical,

    #[error("step size dt = {dt} exceeds the stability bound {limit} (dt * |G|_inf must stay below 2)")]
    StepSize { dt: f64, limit: f64 },

    #[error("integration became unstable ({0}); retry with a smaller dt")]
    Unstable(String),

    #[error("linear system is singular: {0}")]
    Singular(&'static str),

    #[error("steady state is not unique (at least {near_zero_pivots} extra near-zero pivots)")]
    NotUnique { near_zero_pivots: usize },

    #[error("density matrix invalid: {0}")]
    InvalidState(String),

    #[error("cross-check failed: {what} differs by {diff:e}")]
    CrossCheck { what: &'static str, diff: f64 },

    #[error("{0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}
