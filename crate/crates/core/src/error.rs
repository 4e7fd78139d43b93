use thiserror::Error;

pub type Result<T, E = WgError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum WgError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate cell {cell}: measure {measure:e}")]
    DegenerateCell { cell: usize, measure: f64 },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("boundary face {face} is assigned to neither the Dirichlet nor the Robin part")]
    UnassignedBoundary { face: usize },

    #[error("singular local matrix on cell {cell}")]
    SingularLocalMatrix { cell: usize },

    #[error("non-finite value produced while {0}")]
    NonFinite(String),

    #[error(
        "{method} did not converge: relative residual {residual:e} after {iterations} iterations"
    )]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("{method} broke down at iteration {iteration}")]
    Breakdown {
        method: &'static str,
        iteration: usize,
        history: Vec<f64>,
    },

    #[error("matrix is not symmetric (max asymmetry {0:e}); CG requires a symmetric system")]
    NotSymmetric(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expression error at offset {offset}: {msg}")]
    Expr { offset: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
