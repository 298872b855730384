use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("closed-form roots exist only up to degree 4, got degree {degree}; use solve_general")]
    DegreeTooHigh { degree: usize },

    #[error(
        "root iteration did not converge after {sweeps} sweeps (max residual {max_residual:e})"
    )]
    NoConvergence {
        sweeps: usize,
        best: Vec<Complex64>,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("root {index} has residual {residual:e}, above the acceptance bound {bound:e}")]
    RootResidual {
        index: usize,
        residual: f64,
        bound: f64,
    },

    #[error(
        "eigenvalues {first} and {second} coincide within tolerance; use hermite_coefficients"
    )]
    CoincidentNodes { first: usize, second: usize },

    #[error("equal nodes at positions {first} and {second} are not adjacent")]
    NonAdjacentNodes { first: usize, second: usize },

    #[error("function `{kind}` cannot supply derivative of order {order}")]
    DerivativeUnavailable { kind: &'static str, order: usize },

    #[error("tabulated function has no value at {0}")]
    MissingTabulatedValue(Complex64),

    #[error("function `{0}` is not supported by the reference method")]
    UnsupportedFunction(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Taylor series did not converge within {terms} terms")]
    SeriesDivergence { terms: usize },
}
