//! Characteristic polynomials, companion matrices and the Cayley-Hamilton
//! reduction of matrix powers.
//!
//! Polynomials are kept in the monic convention
//! `lambda^n + p[1] lambda^(n-1) + ... + p[n]`, storing only `p[1..=n]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{SquareMatrix, ONE, ZERO};

/// Beyond this size Faddeev-LeVerrier loses too many digits to be trusted.
pub const FADDEEV_LEVERRIER_MAX_RELIABLE_N: usize = 12;

/// Monic characteristic polynomial `lambda^n + p1 lambda^(n-1) + ... + pn`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPolynomial {
    p: Vec<Complex64>,
}

impl CharacteristicPolynomial {
    /// Wraps `p1..pn`. The degree is the number of coefficients.
    pub fn new(p: Vec<Complex64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument(
                "characteristic polynomial needs degree >= 1".into(),
            ));
        }
        if let Some(index) = p.iter().position(|z| !crate::numkernel::is_finite(*z)) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { p })
    }

    /// Expands `(lambda - r1)...(lambda - rn)`.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        let mut monic = vec![ONE];
        for &r in roots {
            monic.push(ZERO);
            for j in (1..monic.len()).rev() {
                let prev = monic[j - 1];
                monic[j] -= r * prev;
            }
        }
        Self::new(monic[1..].to_vec())
    }

    pub fn degree(&self) -> usize {
        self.p.len()
    }

    /// `p1..pn`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.p
    }

    /// `p_j` for `0 <= j <= n`, with `p_0 = 1`.
    pub fn coeff(&self, j: usize) -> Complex64 {
        if j == 0 {
            ONE
        } else {
            self.p[j - 1]
        }
    }

    /// `[1, p1, ..., pn]`, highest power first.
    pub fn monic_coeffs(&self) -> Vec<Complex64> {
        std::iter::once(ONE).chain(self.p.iter().copied()).collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.p.iter().fold(ONE, |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut value = ONE;
        let mut deriv = ZERO;
        for &c in &self.p {
            deriv = deriv * z + value;
            value = value * z + c;
        }
        (value, deriv)
    }

    /// `sum_j |p_j| |z|^(n-j)`: scale of the rounding error committed when
    /// evaluating the polynomial at `z`.
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.p.iter().fold(1.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.p.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients `a_k` of the Taylor expansion `p(z + h) = sum_k a_k h^k`,
    /// lowest order first, by repeated synthetic division.
    pub fn taylor_at(&self, z: Complex64) -> Vec<Complex64> {
        let mut work = self.monic_coeffs();
        let n = work.len() - 1;
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            for j in 1..work.len() - k {
                let prev = work[j - 1];
                work[j] += z * prev;
            }
            out.push(work[n - k]);
        }
        out
    }
}

/// Coefficients of `det(lambda E - A)` by the Faddeev-LeVerrier recurrence.
///
/// `M_1 = E`, `p_k = -tr(A M_k) / k`, `M_(k+1) = A M_k + p_k E`.
pub fn char_poly(a: &SquareMatrix) -> CharacteristicPolynomial {
    let n = a.n();
    let mut p = Vec::with_capacity(n);
    let mut m = SquareMatrix::identity(n);
    for k in 1..=n {
        let am = a * &m;
        let pk = -am.trace() / k as f64;
        p.push(pk);
        if k < n {
            m = am.add_diagonal(pk);
        }
    }
    CharacteristicPolynomial { p }
}

/// Companion matrix: ones on the subdiagonal and `(-pn, ..., -p1)` in the
/// last column.
pub fn companion(p: &CharacteristicPolynomial) -> SquareMatrix {
    let n = p.degree();
    let mut l = SquareMatrix::zeros(n);
    for i in 1..n {
        l[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        l[(i, n - 1)] = -p.coeff(n - i);
    }
    l
}

/// Quotient of a characteristic polynomial by `(lambda - node)`.
///
/// `quotient = [1, (p1)_k, ..., (p_(n-1))_k]` where `(p_j)_k` is `p_j`
/// with every term containing the removed root dropped. The same numbers
/// are the entries of the companion eigenvector for `node`, read bottom up.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflatedCoefficients {
    pub node: Complex64,
    pub quotient: Vec<Complex64>,
    pub remainder: Complex64,
}

impl DeflatedCoefficients {
    /// `(p_j)_k`, with `(p_0)_k = 1`.
    pub fn reduced(&self, j: usize) -> Complex64 {
        self.quotient[j]
    }

    /// Monic coefficients of `(lambda - node) * q(lambda)`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.quotient.len();
        let mut out = vec![ZERO; n + 1];
        for (j, &q) in self.quotient.iter().enumerate() {
            out[j] += q;
            out[j + 1] -= self.node * q;
        }
        out
    }
}

/// Synthetic division of `p` by `(lambda - node)`.
pub fn deflate(p: &CharacteristicPolynomial, node: Complex64) -> DeflatedCoefficients {
    let n = p.degree();
    let mut quotient = Vec::with_capacity(n);
    quotient.push(ONE);
    for j in 1..n {
        let q = p.coeff(j) + node * quotient[j - 1];
        quotient.push(q);
    }
    let remainder = p.coeff(n) + node * quotient[n - 1];
    DeflatedCoefficients {
        node,
        quotient,
        remainder,
    }
}

/// `L^m e_1`: the coordinates `c` with `A^m = sum_l c[l] A^l` for every `A`
/// whose characteristic polynomial is `p`.
pub fn power_column(p: &CharacteristicPolynomial, m: usize) -> Vec<Complex64> {
    let n = p.degree();
    let mut v = vec![ZERO; n];
    v[0] = ONE;
    for _ in 0..m {
        v = companion_apply(p, &v);
    }
    v
}

// L v without forming L.
fn companion_apply(p: &CharacteristicPolynomial, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let last = v[n - 1];
    let mut out = Vec::with_capacity(n);
    out.push(-p.coeff(n) * last);
    for i in 1..n {
        out.push(v[i - 1] - p.coeff(n - i) * last);
    }
    out
}

/// Reduces `A^m` to the basis `E, A, ..., A^(n-1)` and sums it back up.
pub fn reduce_power(
    a: &SquareMatrix,
    p: &CharacteristicPolynomial,
    m: usize,
) -> Result<SquareMatrix> {
    crate::numkernel::horner_matrix_poly(a, &power_column(p, m))
}
