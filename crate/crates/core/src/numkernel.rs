//! Dense complex square matrices with the small set of operations the
//! spectral synthesis needs.
//!
//! Storage is row-major. Every public constructor rejects NaN and infinite
//! entries, so a `SquareMatrix` that came from user input is always finite.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Dense `n x n` complex matrix.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl SquareMatrix {
    /// Builds a matrix from `n * n` row-major entries.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|z| !is_finite(*z)) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be at least 1");
        Self {
            n,
            entries: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| is_finite(*z))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    /// Adds `s` to every diagonal entry.
    pub fn add_diagonal(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] += s;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "vector length must match matrix dimension");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        match Lu::factorize(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => ZERO,
        }
    }

    /// Solves `self * x = rhs`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.len(),
            });
        }
        Ok(Lu::factorize(self)?.solve(rhs))
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = Lu::factorize(self)?;
        let n = self.n;
        let mut inv = Self::zeros(n);
        let mut basis = vec![ZERO; n];
        for j in 0..n {
            basis.fill(ZERO);
            basis[j] = ONE;
            for (i, x) in lu.solve(&basis).into_iter().enumerate() {
                inv[(i, j)] = x;
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.n + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>12.5e}{:+.5e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Matrix product. Fails when the dimensions differ.
pub fn mat_mul(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            actual: b.n,
        });
    }
    let n = a.n;
    let mut out = SquareMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            let brow = b.row(k);
            let orow = &mut out.entries[i * n..(i + 1) * n];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn mat_add(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    zip_with(a, b, |x, y| x + y)
}

pub fn mat_sub(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    zip_with(a, b, |x, y| x - y)
}

fn zip_with(
    a: &SquareMatrix,
    b: &SquareMatrix,
    op: impl Fn(Complex64, Complex64) -> Complex64,
) -> Result<SquareMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            actual: b.n,
        });
    }
    Ok(SquareMatrix {
        n: a.n,
        entries: a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(&x, &y)| op(x, y))
            .collect(),
    })
}

// Operator forms panic on dimension mismatch, like the std slice APIs.
impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        mat_mul(self, rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        mat_add(self, rhs).expect("matrix sum dimension mismatch")
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        mat_sub(self, rhs).expect("matrix difference dimension mismatch")
    }
}

/// `f[0] E + f[1] A + ... + f[n-1] A^(n-1)` by Horner's scheme, using
/// `n - 1` matrix products.
pub fn horner_matrix_poly(a: &SquareMatrix, coeffs: &[Complex64]) -> Result<SquareMatrix> {
    if coeffs.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            actual: coeffs.len(),
        });
    }
    let mut acc = SquareMatrix::identity(a.n).scale(coeffs[a.n - 1]);
    for &f in coeffs[..a.n - 1].iter().rev() {
        acc = (&acc * a).add_diagonal(f);
    }
    Ok(acc)
}

pub fn frobenius_norm(a: &SquareMatrix) -> f64 {
    a.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||a - b||_F / ||b||_F`, falling back to the absolute difference when
/// `b` is zero.
pub fn relative_frobenius_error(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    let diff = frobenius_norm(&(a - b));
    let scale = frobenius_norm(b);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

struct Lu {
    lu: SquareMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    fn factorize(a: &SquareMatrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| lu[(x, col)].norm().total_cmp(&lu[(y, col)].norm()))
                .unwrap_or(col);
            if lu[(pivot, col)] == ZERO {
                return Err(Error::Singular { pivot: col });
            }
            if pivot != col {
                for j in 0..n {
                    lu.entries.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                sign = -sign;
            }
            let d = lu[(col, col)];
            for row in col + 1..n {
                let factor = lu[(row, col)] / d;
                lu[(row, col)] = factor;
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(row, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    fn determinant(&self) -> Complex64 {
        (0..self.lu.n).fold(c64(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let yj = y[j];
                y[i] -= l * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let yj = y[j];
                y[i] -= u * yj;
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}
