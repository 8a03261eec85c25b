use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("site index {site} out of range for {n_sites} matter sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("step size underflow at t = {t} (h = {h:e}); the problem is too stiff for the explicit integrator")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invariant violated at t = {t}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("steady state is not unique: {multiplicity} eigenvalues with |lambda| < {threshold:e}")]
    DegenerateSteadyState {
        multiplicity: usize,
        threshold: f64,
        basis: Vec<crate::operator::ComplexMatrix>,
    },

    #[error("steady-state solver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("observable undefined: {0}")]
    Undefined(String),

    #[error("at least two trajectories are needed for error bars, got {0}")]
    TooFewTrajectories(usize),

    #[error("invalid gate sequence: {0}")]
    InvalidCircuit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("linear algebra failure: {0}")]
    LinAlg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidConfig(_) => "invalid_config",
            Error::InvalidState(_) => "invalid_state",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::InvariantViolation { .. } => "invariant_violation",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ResourceLimit(_) => "resource_limit",
            Error::Undefined(_) => "undefined",
            Error::TooFewTrajectories(_) => "too_few_trajectories",
            Error::InvalidCircuit(_) => "invalid_circuit",
            Error::Parse { .. } => "parse",
            Error::LinAlg(_) => "linear_algebra",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
