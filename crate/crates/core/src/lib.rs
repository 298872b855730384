//! Matrix functions `F(A)`, chiefly `e^(tA)`, for small dense complex
//! matrices.
//!
//! The Cayley-Hamilton theorem reduces any entire `F(A)` to
//! `f_0 E + f_1 A + ... + f_(n-1) A^(n-1)`. The coefficients come from the
//! roots of the characteristic polynomial through the diagonalization of its
//! companion matrix, or through Hermite interpolation when roots repeat.
//! A scaling-and-squaring oracle provides an independent reference.

pub mod charpoly;
pub mod cli;
pub mod error;
pub mod numkernel;
pub mod oracle;
pub mod roots;
pub mod sampling;
pub mod synthesis;

pub use charpoly::{
    char_poly, companion, deflate, power_column, CharacteristicPolynomial, DeflatedCoefficients,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numkernel::{frobenius_norm, horner_matrix_poly, mat_mul, SquareMatrix};
pub use oracle::{oracle_expm, oracle_matfun, OracleConfig};
pub use roots::{cluster, solve_closed, solve_general, ClusterNode, ClusteredSpectrum, Spectrum};
pub use synthesis::{
    build_trace, divided_difference_table, evaluate_matrix_function, hermite_coefficients,
    lagrange_coefficients, CoefficientVector, EvalOptions, Evaluation, ScalarFunction,
    SpectralAnalysis, SynthesisTrace,
};
