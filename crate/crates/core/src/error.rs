use std::path::PathBuf;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid step size {0:e}")]
    InvalidStep(f64),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("direct solver failed: {0}")]
    DirectSolver(String),

    #[error("iterative solver failed ({reason}) after {iterations} iterations, relative residual {residual:e}")]
    IterativeSolver {
        reason: String,
        iterations: usize,
        residual: f64,
        /// Relative residual after every iteration.
        trace: Vec<f64>,
    },

    #[error("degenerate predictor: extrapolated nodal vector at dof {dof} has length {norm:e}")]
    DegeneratePredictor { dof: usize, norm: f64 },

    #[error("time step failed: {0}")]
    StepFailure(String),

    #[error("spatial tolerance {tol:e} not reached after {iterations} refinement passes (best total indicator {best:e})")]
    ToleranceUnreachable {
        tol: f64,
        iterations: usize,
        best: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that come from the numerics rather than from user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::Io { .. } | Error::InvalidDomain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
