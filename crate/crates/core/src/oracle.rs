//! Reference matrix functions that share no code with the spectral path
//! beyond matrix arithmetic: scaling-and-squaring Taylor for `exp`, and
//! `sin`/`cos` from `exp(+-iA)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{c64, frobenius_norm, SquareMatrix, ONE};
use crate::synthesis::{FunctionKind, ScalarFunction};

const MAX_TAYLOR_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Relative Frobenius size of the last Taylor term kept.
    pub target_tolerance: f64,
    pub max_squarings: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            target_tolerance: 1e-13,
            max_squarings: 40,
        }
    }
}

impl OracleConfig {
    pub fn new(target_tolerance: f64, max_squarings: u32) -> Result<Self> {
        let cfg = Self {
            target_tolerance,
            max_squarings,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_tolerance > 0.0 && self.target_tolerance <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "oracle tolerance must lie in (0, 1e-2], got {}",
                self.target_tolerance
            )));
        }
        if self.max_squarings > 60 {
            return Err(Error::InvalidArgument(format!(
                "at most 60 squarings allowed, got {}",
                self.max_squarings
            )));
        }
        Ok(())
    }
}

/// `e^A` by scaling and squaring a truncated Taylor series.
///
/// Picks the smallest `s` with `||A||_F / 2^s <= 0.5`, sums the series of
/// `e^(A/2^s)` until a term drops below `tol * ||partial sum|| * 2^-s`, then
/// squares `s` times.
pub fn oracle_expm(a: &SquareMatrix, cfg: &OracleConfig) -> Result<SquareMatrix> {
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::NonFinite {
            index: a
                .entries()
                .iter()
                .position(|z| !crate::numkernel::is_finite(*z))
                .unwrap_or(0),
        });
    }
    let norm = frobenius_norm(a);
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    if squarings > cfg.max_squarings {
        return Err(Error::InvalidArgument(format!(
            "norm {norm:e} needs {squarings} squarings, above the limit {}",
            cfg.max_squarings
        )));
    }
    let inv_scale = 2f64.powi(-(squarings as i32));
    let x = a.scale(c64(inv_scale, 0.0));

    let n = a.n();
    let mut sum = SquareMatrix::identity(n);
    let mut term = SquareMatrix::identity(n);
    let mut converged = false;
    for k in 1..=MAX_TAYLOR_TERMS {
        term = (&term * &x).scale(c64(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if frobenius_norm(&term) <= cfg.target_tolerance * frobenius_norm(&sum) * inv_scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesDivergence {
            terms: MAX_TAYLOR_TERMS,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `F(A)` for the built-in function kinds, honouring the function's time
/// factor.
pub fn oracle_matfun(
    a: &SquareMatrix,
    f: &ScalarFunction,
    cfg: &OracleConfig,
) -> Result<SquareMatrix> {
    let ta = a.scale(c64(f.time, 0.0));
    let i = Complex64::i();
    match &f.kind {
        FunctionKind::Exp => oracle_expm(&ta, cfg),
        FunctionKind::Sin => {
            let plus = oracle_expm(&ta.scale(i), cfg)?;
            let minus = oracle_expm(&ta.scale(-i), cfg)?;
            Ok((&plus - &minus).scale(ONE / (2.0 * i)))
        }
        FunctionKind::Cos => {
            let plus = oracle_expm(&ta.scale(i), cfg)?;
            let minus = oracle_expm(&ta.scale(-i), cfg)?;
            Ok((&plus + &minus).scale(c64(0.5, 0.0)))
        }
        FunctionKind::Monomial(m) => {
            let mut out = SquareMatrix::identity(a.n());
            for k in 0..*m {
                out = if k == 0 { ta.clone() } else { &out * &ta };
            }
            Ok(out)
        }
        FunctionKind::Polynomial(coeffs) => {
            let n = a.n();
            let mut out = SquareMatrix::zeros(n);
            for &c in coeffs.iter().rev() {
                out = (&out * &ta).add_diagonal(c);
            }
            Ok(out)
        }
        FunctionKind::Tabulated(_) => Err(Error::UnsupportedFunction("tabulated")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::relative_frobenius_error;

    #[test]
    fn zero_matrix_gives_identity() {
        let out = oracle_expm(&SquareMatrix::zeros(3), &OracleConfig::default()).unwrap();
        assert_eq!(out, SquareMatrix::identity(3));
    }

    #[test]
    fn diagonal_logarithms() {
        let a = SquareMatrix::from_diagonal(&[c64(2f64.ln(), 0.0), c64(3f64.ln(), 0.0)]);
        let out = oracle_expm(&a, &OracleConfig::default()).unwrap();
        let expected = SquareMatrix::from_diagonal(&[c64(2.0, 0.0), c64(3.0, 0.0)]);
        assert!(relative_frobenius_error(&out, &expected) < 1e-12);
    }

    #[test]
    fn rotation_generator() {
        let theta: f64 = 1.2;
        let a = SquareMatrix::from_real_rows(&[vec![0.0, theta], vec![-theta, 0.0]]).unwrap();
        let out = oracle_expm(&a, &OracleConfig::default()).unwrap();
        let rot = SquareMatrix::from_real_rows(&[
            vec![theta.cos(), theta.sin()],
            vec![-theta.sin(), theta.cos()],
        ])
        .unwrap();
        assert!(frobenius_norm(&(&out - &rot)) < 1e-12);
    }

    #[test]
    fn monomial_uses_plain_products() {
        let a = SquareMatrix::from_rows(&[
            vec![c64(1.0, 0.5), c64(-0.3, 0.0)],
            vec![c64(0.2, 0.2), c64(0.0, -1.0)],
        ])
        .unwrap();
        let out =
            oracle_matfun(&a, &ScalarFunction::monomial(2), &OracleConfig::default()).unwrap();
        assert_eq!(out, &a * &a);
        let zeroth =
            oracle_matfun(&a, &ScalarFunction::monomial(0), &OracleConfig::default()).unwrap();
        assert_eq!(zeroth, SquareMatrix::identity(2));
    }

    #[test]
    fn sine_of_diagonal() {
        let a = SquareMatrix::from_diagonal(&[c64(0.5, 0.0), c64(1.0, 0.0)]);
        let out = oracle_matfun(&a, &ScalarFunction::sin(), &OracleConfig::default()).unwrap();
        let expected = SquareMatrix::from_diagonal(&[c64(0.5f64.sin(), 0.0), c64(1f64.sin(), 0.0)]);
        assert!(relative_frobenius_error(&out, &expected) < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(OracleConfig::new(0.0, 10).is_err());
        assert!(OracleConfig::new(0.1, 10).is_err());
        assert!(OracleConfig::new(1e-10, 61).is_err());
        assert!(OracleConfig::new(1e-2, 60).is_ok());
        let big = SquareMatrix::identity(2).scale(c64(1e30, 0.0));
        assert!(oracle_expm(&big, &OracleConfig::new(1e-10, 10).unwrap()).is_err());
    }

    #[test]
    fn tabulated_is_rejected() {
        let f = ScalarFunction::tabulated(vec![]);
        assert_eq!(
            oracle_matfun(&SquareMatrix::identity(2), &f, &OracleConfig::default()).unwrap_err(),
            Error::UnsupportedFunction("tabulated")
        );
    }
}
