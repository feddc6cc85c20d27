use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("overlap matrix is not positive definite (condition estimate {condition:.3e})")]
    SingularOverlap { condition: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("spurious state in channel kappa={kappa}: {detail}")]
    SpuriousState { kappa: i32, detail: String },

    #[error("ambiguous shell clustering: eigenvalues {a:.12e} and {b:.12e} closer than 10x tolerance {tol:.3e}")]
    AmbiguousClustering { a: f64, b: f64, tol: f64 },

    #[error("not enough states: requested {requested}, available {available}")]
    NotEnoughStates { requested: usize, available: usize },

    #[error("Gram matrix deviates from identity by {0:.3e}")]
    GramViolation(f64),

    #[error("mean-field eigenvalue {0:.6e} lies inside the zero window; positive projector undefined")]
    ZeroEigenvalue(f64),

    #[error("SCF did not converge after {iterations} iterations (last residual {last_residual:.3e})")]
    ScfNotConverged {
        iterations: usize,
        last_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("Newton iteration diverged (residual trace {0:?})")]
    NewtonDiverged(Vec<f64>),

    #[error("multipole order {requested} exceeds L_max {lmax}")]
    LmaxExceeded { requested: usize, lmax: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("no matching Schrodinger level: {0}")]
    NoMatchingLevel(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::InvalidParameter(_) | LabError::NotEnoughStates { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
