use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular pivot at row {row}")]
    SingularPivot { row: usize },

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("Newton failed to converge after {iterations} iterations (best residual {best_residual:e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    #[error("sign violation: {0}")]
    SignViolation(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("coordinate {coordinate} outside data range [{lo}, {hi}]")]
    OutOfRange { coordinate: f64, lo: f64, hi: f64 },

    #[error("far-field estimates disagree by {0:e}")]
    FarFieldDisagreement(f64),

    #[error("continuation step underflow at lambda = {at_lambda}")]
    StepUnderflow { at_lambda: f64 },

    #[error("eigen-iteration did not converge: {0}")]
    EigenNonConvergence(String),

    #[error("minimizer at bracket edge ({0})")]
    BracketEdge(f64),

    #[error("lambda mismatch: {0} vs {1}")]
    LambdaMismatch(f64, f64),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidInput(msg.into()))
}
