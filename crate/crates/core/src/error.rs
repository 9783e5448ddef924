use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("not an X-state: element rho{element} has magnitude {magnitude:.3e}")]
    NotXState { element: &'static str, magnitude: f64 },

    #[error("invalid principal-minor index set {0:?}: indices must be strictly increasing in 1..=4")]
    InvalidIndices(Vec<usize>),

    #[error("invalid reservoir parameters: {0}")]
    InvalidParams(String),

    #[error("time must be non-negative and finite, got {0}")]
    NegativeTime(f64),

    #[error("decay factor p must lie in (0, 1], got {0}")]
    InvalidDecayFactor(f64),

    #[error("input state is separable")]
    SeparableInput,

    #[error("state does not satisfy the {0} condition")]
    CaseMismatch(&'static str),

    #[error("ESD cannot be averted at non-zero reservoir temperature (m = {m}, n = {n})")]
    FiniteTemperature { m: f64, n: f64 },

    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("integrator step budget exceeded: {needed} steps > {max_steps}")]
    StepBudgetExceeded { needed: u64, max_steps: u64 },

    #[error("invalid integrator config: {0}")]
    InvalidIntegrator(String),

    #[error("Jacobi eigenvalue iteration did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("state format: {0}")]
    Format(String),
}

impl Error {
    /// Failures of a computation on valid input, as opposed to rejected
    /// input.
    pub fn is_runtime(&self) -> bool {
        matches!(self, Error::StepBudgetExceeded { .. } | Error::EigenNoConvergence { .. })
    }
}
