//! Coefficients `f_0..f_(n-1)` with `F(A) = f_0 E + f_1 A + ... + f_(n-1) A^(n-1)`.
//!
//! For distinct eigenvalues `a_k` the coefficients are
//!
//! ```text
//! f_l = (-1)^(n+1) sum_k (p_(n-l-1))_k F(a_k) / prod_(j != k) (a_j - a_k)
//! ```
//!
//! where `(p_j)_k` are the deflated coefficients of the characteristic
//! polynomial. Repeated eigenvalues go through Hermite interpolation built
//! from confluent divided differences, which is the limit of the formula
//! above as eigenvalues merge.

use std::ops::Deref;

use num_complex::Complex64;

use crate::charpoly::{
    char_poly, companion, deflate, CharacteristicPolynomial, FADDEEV_LEVERRIER_MAX_RELIABLE_N,
};
use crate::error::{Error, Result};
use crate::numkernel::{
    c64, frobenius_norm, horner_matrix_poly, is_finite, SquareMatrix, ONE, ZERO,
};
use crate::roots::{
    cluster, residual_bound, snap_multiple_roots, solve, ClusteredSpectrum, RootSolver, Spectrum,
    DEFAULT_CLUSTER_TOL,
};

/// Scalar function kinds the synthesis can apply.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Exp,
    Sin,
    Cos,
    /// `z^m`
    Monomial(u32),
    /// Ascending coefficients `c_0 + c_1 z + ...`.
    Polynomial(Vec<Complex64>),
    /// Point values only; usable on distinct spectra.
    Tabulated(Vec<(Complex64, Complex64)>),
}

/// `lambda -> F(t lambda)` for a built-in or tabulated `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    pub kind: FunctionKind,
    pub time: f64,
}

impl ScalarFunction {
    pub fn new(kind: FunctionKind) -> Self {
        Self { kind, time: 1.0 }
    }

    pub fn exp() -> Self {
        Self::new(FunctionKind::Exp)
    }

    pub fn sin() -> Self {
        Self::new(FunctionKind::Sin)
    }

    pub fn cos() -> Self {
        Self::new(FunctionKind::Cos)
    }

    pub fn monomial(m: u32) -> Self {
        Self::new(FunctionKind::Monomial(m))
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(FunctionKind::Polynomial(coeffs))
    }

    pub fn tabulated(points: Vec<(Complex64, Complex64)>) -> Self {
        Self::new(FunctionKind::Tabulated(points))
    }

    /// The same function composed with `lambda -> t lambda`.
    pub fn at_time(&self, t: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            time: self.time * t,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FunctionKind::Exp => "exp",
            FunctionKind::Sin => "sin",
            FunctionKind::Cos => "cos",
            FunctionKind::Monomial(_) => "monomial",
            FunctionKind::Polynomial(_) => "polynomial",
            FunctionKind::Tabulated(_) => "tabulated",
        }
    }

    /// Highest derivative order available, `None` when unbounded.
    pub fn max_derivative_order(&self) -> Option<usize> {
        match self.kind {
            FunctionKind::Tabulated(_) => Some(0),
            _ => None,
        }
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.derivative(z, 0)
    }

    /// `d^r/dz^r F(t z) = t^r F^(r)(t z)`.
    pub fn derivative(&self, z: Complex64, order: usize) -> Result<Complex64> {
        let t = self.time;
        let w = z * t;
        let chain = t.powi(order as i32);
        let raw = match &self.kind {
            FunctionKind::Exp => w.exp(),
            FunctionKind::Sin => match order % 4 {
                0 => w.sin(),
                1 => w.cos(),
                2 => -w.sin(),
                _ => -w.cos(),
            },
            FunctionKind::Cos => match order % 4 {
                0 => w.cos(),
                1 => -w.sin(),
                2 => -w.cos(),
                _ => w.sin(),
            },
            FunctionKind::Monomial(m) => {
                let m = *m as usize;
                if order > m {
                    ZERO
                } else {
                    let falling: f64 = ((m - order + 1)..=m).map(|k| k as f64).product();
                    w.powu((m - order) as u32) * falling
                }
            }
            FunctionKind::Polynomial(coeffs) => poly_derivative(coeffs, w, order),
            FunctionKind::Tabulated(points) => {
                if order > 0 {
                    return Err(Error::DerivativeUnavailable {
                        kind: "tabulated",
                        order,
                    });
                }
                let tol = 1e-10 * w.norm().max(1.0);
                points
                    .iter()
                    .find(|(x, _)| (x - w).norm() <= tol)
                    .map(|&(_, y)| y)
                    .ok_or(Error::MissingTabulatedValue(w))?
            }
        };
        Ok(raw * chain)
    }

    fn check_order(&self, order: usize) -> Result<()> {
        match self.max_derivative_order() {
            Some(max) if order > max => Err(Error::DerivativeUnavailable {
                kind: self.name(),
                order,
            }),
            _ => Ok(()),
        }
    }
}

// r-th derivative of an ascending-coefficient polynomial.
fn poly_derivative(coeffs: &[Complex64], z: Complex64, order: usize) -> Complex64 {
    let mut acc = ZERO;
    for (k, &c) in coeffs.iter().enumerate().skip(order).rev() {
        let falling: f64 = ((k - order + 1)..=k).map(|x| x as f64).product();
        acc = acc * z + c * falling;
    }
    acc
}

/// `f_0..f_(n-1)`, lowest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub f: Vec<Complex64>,
}

impl Deref for CoefficientVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.f
    }
}

impl CoefficientVector {
    /// `sum_l f_l z^l`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.f.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// r-th derivative of `sum_l f_l z^l`.
    pub fn eval_derivative(&self, z: Complex64, order: usize) -> Complex64 {
        poly_derivative(&self.f, z, order)
    }
}

/// Distinct-eigenvalue formula with deflated coefficients.
pub fn lagrange_coefficients(
    p: &CharacteristicPolynomial,
    s: &Spectrum,
    f: &ScalarFunction,
) -> Result<CoefficientVector> {
    let n = p.degree();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: s.len(),
        });
    }
    check_distinct(&s.values, DEFAULT_CLUSTER_TOL)?;

    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut coeffs = vec![ZERO; n];
    for (k, &alpha) in s.values.iter().enumerate() {
        let weight = f.value(alpha)? / gap_product(&s.values, k);
        let reduced = deflate(p, alpha);
        for (l, c) in coeffs.iter_mut().enumerate() {
            *c += reduced.reduced(n - l - 1) * weight;
        }
    }
    for c in &mut coeffs {
        *c *= sign;
    }
    Ok(CoefficientVector { f: coeffs })
}

// prod_(j != k) (a_j - a_k)
fn gap_product(values: &[Complex64], k: usize) -> Complex64 {
    values
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .fold(ONE, |acc, (_, &aj)| acc * (aj - values[k]))
}

fn check_distinct(values: &[Complex64], tol: f64) -> Result<()> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if (values[i] - values[j]).norm() <= tol * scale {
                return Err(Error::CoincidentNodes {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Newton divided differences, confluent where nodes repeat.
///
/// `columns[k][i]` is `F[x_i, ..., x_(i+k)]`; the top row
/// `columns[k][0]` holds the Newton coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceTable {
    pub nodes: Vec<Complex64>,
    pub columns: Vec<Vec<Complex64>>,
}

impl DividedDifferenceTable {
    pub fn entry(&self, start: usize, order: usize) -> Complex64 {
        self.columns[order][start]
    }

    pub fn newton_coefficients(&self) -> Vec<Complex64> {
        self.columns.iter().map(|c| c[0]).collect()
    }

    /// Expands `sum_k c_k prod_(i<k) (z - x_i)` into monomial coefficients,
    /// multiplying by one `(z - x_k)` factor at a time.
    pub fn monomial_coefficients(&self) -> Vec<Complex64> {
        let newton = self.newton_coefficients();
        let n = newton.len();
        let mut poly = vec![newton[n - 1]];
        for k in (0..n - 1).rev() {
            // poly <- poly * (z - x_k) + c_k
            let mut next = vec![ZERO; poly.len() + 1];
            for (j, &c) in poly.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * self.nodes[k];
            }
            next[0] += newton[k];
            poly = next;
        }
        poly
    }
}

/// Builds the table with `F[a, ..., a] = F^(r)(a) / r!` for `r + 1` equal
/// nodes. Equal nodes must be adjacent.
pub fn divided_difference_table(
    nodes: &[Complex64],
    f: &ScalarFunction,
) -> Result<DividedDifferenceTable> {
    let n = nodes.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no interpolation nodes".into()));
    }
    // Run lengths of equal nodes; an equal value after a break is an error.
    for i in 0..n {
        for j in i + 2..n {
            if nodes[i] == nodes[j] && nodes[j - 1] != nodes[i] {
                return Err(Error::NonAdjacentNodes {
                    first: i,
                    second: j,
                });
            }
        }
    }

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    columns.push(nodes.iter().map(|&x| f.value(x)).collect::<Result<_>>()?);
    let mut factorial = 1.0;
    for k in 1..n {
        factorial *= k as f64;
        let prev = &columns[k - 1];
        let mut col = Vec::with_capacity(n - k);
        for i in 0..n - k {
            let (lo, hi) = (nodes[i], nodes[i + k]);
            let value = if lo == hi {
                f.check_order(k)?;
                f.derivative(lo, k)? / factorial
            } else {
                (prev[i + 1] - prev[i]) / (hi - lo)
            };
            col.push(value);
        }
        columns.push(col);
    }
    Ok(DividedDifferenceTable {
        nodes: nodes.to_vec(),
        columns,
    })
}

/// Hermite interpolation over the clustered spectrum, expanded into monomial
/// coefficients.
pub fn hermite_coefficients(
    cs: &ClusteredSpectrum,
    f: &ScalarFunction,
) -> Result<CoefficientVector> {
    let needed = cs.max_multiplicity().saturating_sub(1);
    f.check_order(needed)?;
    let table = divided_difference_table(&cs.expanded(), f)?;
    Ok(CoefficientVector {
        f: table.monomial_coefficients(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisPath {
    Lagrange,
    Hermite,
}

impl SynthesisPath {
    pub fn as_str(self) -> &'static str {
        match self {
            SynthesisPath::Lagrange => "lagrange",
            SynthesisPath::Hermite => "hermite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Relative single-linkage distance for merging eigenvalues.
    pub cluster_tol: f64,
    /// Snap root groups that look like one perturbed multiple root.
    pub snap_multiple_roots: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            cluster_tol: DEFAULT_CLUSTER_TOL,
            snap_multiple_roots: true,
        }
    }
}

/// What the pipeline saw and decided.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub polynomial: CharacteristicPolynomial,
    pub raw_spectrum: Spectrum,
    pub spectrum: ClusteredSpectrum,
    /// `|p(a)|` per clustered node.
    pub residuals: Vec<f64>,
    pub residual_max: f64,
    pub residual_bound: f64,
    pub min_gap: Option<f64>,
    pub solver: RootSolver,
    pub path: SynthesisPath,
    pub snapped: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub matrix: SquareMatrix,
    pub coefficients: CoefficientVector,
    pub diagnostics: Diagnostics,
}

/// Spectral data of one matrix, reusable across functions and times.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAnalysis {
    pub matrix: SquareMatrix,
    pub diagnostics: Diagnostics,
}

impl SpectralAnalysis {
    /// Characteristic polynomial, roots, optional snapping, clustering.
    pub fn new(a: &SquareMatrix, opts: &EvalOptions) -> Result<Self> {
        if !a.is_finite() {
            let index = a.entries().iter().position(|z| !is_finite(*z)).unwrap_or(0);
            return Err(Error::NonFinite { index });
        }
        if opts.cluster_tol.is_nan() || opts.cluster_tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cluster tolerance must be nonnegative, got {}",
                opts.cluster_tol
            )));
        }
        let p = char_poly(a);
        let (raw, solver) = solve(&p)?;
        let snapped_spectrum = if opts.snap_multiple_roots {
            snap_multiple_roots(&p, &raw)
        } else {
            raw.clone()
        };
        let snapped = snapped_spectrum != raw;
        let cs = cluster(&snapped_spectrum, opts.cluster_tol);
        let residuals: Vec<f64> = cs
            .nodes
            .iter()
            .map(|node| p.eval(node.value).norm())
            .collect();
        let residual_max = residuals.iter().copied().fold(0.0, f64::max);
        let path = if cs.is_simple() {
            SynthesisPath::Lagrange
        } else {
            SynthesisPath::Hermite
        };
        let mut warnings = Vec::new();
        if a.n() > FADDEEV_LEVERRIER_MAX_RELIABLE_N {
            warnings.push(format!(
                "n = {} exceeds {}; characteristic polynomial coefficients may be inaccurate",
                a.n(),
                FADDEEV_LEVERRIER_MAX_RELIABLE_N
            ));
        }
        let bound = residual_bound(&p);
        if residual_max > bound {
            warnings.push(format!(
                "clustered eigenvalue residual {residual_max:e} exceeds {bound:e}"
            ));
        }
        let diagnostics = Diagnostics {
            min_gap: cs.min_gap(),
            polynomial: p,
            raw_spectrum: raw,
            spectrum: cs,
            residuals,
            residual_max,
            residual_bound: bound,
            solver,
            path,
            snapped,
            warnings,
        };
        Ok(Self {
            matrix: a.clone(),
            diagnostics,
        })
    }

    /// Coefficients of `lambda -> F(t lambda)` on this spectrum.
    pub fn coefficients(&self, f: &ScalarFunction, t: f64) -> Result<CoefficientVector> {
        let scaled = f.at_time(t);
        let d = &self.diagnostics;
        match d.path {
            SynthesisPath::Lagrange => {
                let s = Spectrum::new(d.spectrum.expanded());
                lagrange_coefficients(&d.polynomial, &s, &scaled)
            }
            SynthesisPath::Hermite => hermite_coefficients(&d.spectrum, &scaled),
        }
    }

    pub fn evaluate(&self, f: &ScalarFunction, t: f64) -> Result<Evaluation> {
        let coefficients = self.coefficients(f, t)?;
        let matrix = horner_matrix_poly(&self.matrix, &coefficients)?;
        if !matrix.is_finite() {
            let index = matrix
                .entries()
                .iter()
                .position(|z| !is_finite(*z))
                .unwrap_or(0);
            return Err(Error::NonFinite { index });
        }
        Ok(Evaluation {
            matrix,
            coefficients,
            diagnostics: self.diagnostics.clone(),
        })
    }
}

/// `F(tA)` with default options.
pub fn evaluate_matrix_function(
    a: &SquareMatrix,
    f: &ScalarFunction,
    t: f64,
) -> Result<Evaluation> {
    evaluate_matrix_function_with(a, f, t, &EvalOptions::default())
}

pub fn evaluate_matrix_function_with(
    a: &SquareMatrix,
    f: &ScalarFunction,
    t: f64,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    SpectralAnalysis::new(a, opts)?.evaluate(f, t)
}

/// Every intermediate of the companion-matrix diagonalization, for
/// verification. Not used by [`evaluate_matrix_function`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisTrace {
    /// `L`
    pub companion: SquareMatrix,
    /// `e_1`
    pub basis_selector_first: Vec<Complex64>,
    /// `e_n`
    pub basis_selector_last: Vec<Complex64>,
    /// `Q_L[i][k] = a_k^i`
    pub vandermonde: SquareMatrix,
    /// `P_L[i][j] = p_(n-1-i-j)`, zero below the anti-diagonal.
    pub hankel: SquareMatrix,
    /// `U_L`, columns are the companion eigenvectors.
    pub modal: SquareMatrix,
    /// `D_A = diag(a_1, ..., a_n)`
    pub diagonal: SquareMatrix,
    /// `(-1)^(n+1) / prod_(j != k) (a_j - a_k)`, claimed to be
    /// `U_L^-1 e_1 = Q_L^-1 e_n`.
    pub cofactor: Vec<Complex64>,
    polynomial: CharacteristicPolynomial,
    spectrum: Spectrum,
}

/// Relative residuals of the structural identities in a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReport {
    /// `||U_L - P_L Q_L|| / ||U_L||`
    pub decomposition: f64,
    /// `||U_L D_A - L U_L|| / (||L|| ||U_L||)`
    pub diagonalization: f64,
    /// `||U_L c - e_1||`
    pub cofactor_first: f64,
    /// `||Q_L c - e_n||`
    pub cofactor_last: f64,
    /// Largest gap between `U_L` columns and the deflated coefficients.
    pub deflation: f64,
    /// `U_L e^(D_A) c` against the exponential coefficients.
    pub lagrange: f64,
}

impl TraceReport {
    pub fn max(&self) -> f64 {
        [
            self.decomposition,
            self.diagonalization,
            self.cofactor_first,
            self.cofactor_last,
            self.deflation,
            self.lagrange,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn build_trace(p: &CharacteristicPolynomial, s: &Spectrum) -> Result<SynthesisTrace> {
    let n = p.degree();
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: s.len(),
        });
    }
    check_distinct(&s.values, DEFAULT_CLUSTER_TOL)?;

    let mut e_first = vec![ZERO; n];
    e_first[0] = ONE;
    let mut e_last = vec![ZERO; n];
    e_last[n - 1] = ONE;

    let mut vandermonde = SquareMatrix::zeros(n);
    for (k, &alpha) in s.values.iter().enumerate() {
        let mut power = ONE;
        for i in 0..n {
            vandermonde[(i, k)] = power;
            power *= alpha;
        }
    }

    let mut hankel = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n - i {
            hankel[(i, j)] = p.coeff(n - 1 - i - j);
        }
    }

    // Eigenvector entries written out as power sums:
    // row i holds p_(n-1-i) + p_(n-2-i) a + ... + a^(n-1-i).
    let mut modal = SquareMatrix::zeros(n);
    for (k, &alpha) in s.values.iter().enumerate() {
        for i in 0..n {
            let mut acc = ZERO;
            let mut power = ONE;
            for j in 0..n - i {
                acc += p.coeff(n - 1 - i - j) * power;
                power *= alpha;
            }
            modal[(i, k)] = acc;
        }
    }

    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let cofactor = (0..n)
        .map(|k| c64(sign, 0.0) / gap_product(&s.values, k))
        .collect();

    Ok(SynthesisTrace {
        companion: companion(p),
        basis_selector_first: e_first,
        basis_selector_last: e_last,
        vandermonde,
        hankel,
        modal,
        diagonal: SquareMatrix::from_diagonal(&s.values),
        cofactor,
        polynomial: p.clone(),
        spectrum: s.clone(),
    })
}

impl SynthesisTrace {
    /// `e^(tL) e_1 = U_L e^(t D_A) U_L^-1 e_1`, using the cofactor vector.
    pub fn exp_first_column(&self, t: f64) -> Vec<Complex64> {
        let weighted: Vec<Complex64> = self
            .spectrum
            .values
            .iter()
            .zip(&self.cofactor)
            .map(|(&alpha, &c)| (alpha * t).exp() * c)
            .collect();
        self.modal.mul_vec(&weighted)
    }

    pub fn check(&self) -> Result<TraceReport> {
        let n = self.modal.n();
        let modal_norm = frobenius_norm(&self.modal).max(f64::MIN_POSITIVE);

        let decomposition =
            frobenius_norm(&(&self.modal - &(&self.hankel * &self.vandermonde))) / modal_norm;

        let lhs = &self.modal * &self.diagonal;
        let rhs = &self.companion * &self.modal;
        let diagonalization = frobenius_norm(&(&lhs - &rhs))
            / (frobenius_norm(&self.companion).max(1.0) * modal_norm);

        let cofactor_first = vec_distance(
            &self.modal.mul_vec(&self.cofactor),
            &self.basis_selector_first,
        );
        let cofactor_last = vec_distance(
            &self.vandermonde.mul_vec(&self.cofactor),
            &self.basis_selector_last,
        );

        let mut deflation: f64 = 0.0;
        for (k, &alpha) in self.spectrum.values.iter().enumerate() {
            let d = deflate(&self.polynomial, alpha);
            for i in 0..n {
                let diff = (self.modal[(i, k)] - d.reduced(n - 1 - i)).norm();
                deflation = deflation.max(diff / (1.0 + d.reduced(n - 1 - i).norm()));
            }
        }

        let expected =
            lagrange_coefficients(&self.polynomial, &self.spectrum, &ScalarFunction::exp())?;
        let got = self.exp_first_column(1.0);
        let scale = expected
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let lagrange = vec_distance(&got, &expected) / scale;

        Ok(TraceReport {
            decomposition,
            diagonalization,
            cofactor_first,
            cofactor_last,
            deflation,
            lagrange,
        })
    }
}

fn vec_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
