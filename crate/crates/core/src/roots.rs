//! Roots of characteristic polynomials.
//!
//! Degrees 1 to 4 use radicals (Cardano for the cubic, Ferrari for the
//! quartic) in uniform complex arithmetic. Any degree can go through
//! Aberth-Ehrlich simultaneous iteration. [`cluster`] then groups roots that
//! are numerically indistinguishable so the synthesis can take the
//! confluent path.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::charpoly::CharacteristicPolynomial;
use crate::error::{Error, Result};
use crate::numkernel::{c64, is_finite, ONE, ZERO};

/// Relative residual a root must meet: `|p(a)| <= 1e-8 * max(1, max |p_j|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

pub const ABERTH_MAX_SWEEPS: usize = 200;

const ABERTH_STEP_TOL: f64 = 1e-13;

const ABERTH_NOISE_FACTOR: f64 = 1.0;

// Irrational offset so no starting point lands on a symmetry axis of a
// real polynomial.
const ABERTH_ANGLE_OFFSET: f64 = std::f64::consts::SQRT_2 / 2.0;

/// Roots `a_1..a_n` with repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|p(a_k)|` for each root.
    pub fn residuals(&self, p: &CharacteristicPolynomial) -> Vec<f64> {
        self.values.iter().map(|&z| p.eval(z).norm()).collect()
    }

    pub fn max_residual(&self, p: &CharacteristicPolynomial) -> f64 {
        self.residuals(p).into_iter().fold(0.0, f64::max)
    }

    /// Smallest pairwise distance, or `None` for fewer than two roots.
    pub fn min_gap(&self) -> Option<f64> {
        min_pairwise_distance(&self.values)
    }

    fn check_residuals(&self, p: &CharacteristicPolynomial) -> Result<()> {
        let bound = residual_bound(p);
        for (index, residual) in self.residuals(p).into_iter().enumerate() {
            if residual.is_nan() || residual > bound {
                return Err(Error::RootResidual {
                    index,
                    residual,
                    bound,
                });
            }
        }
        Ok(())
    }
}

pub fn residual_bound(p: &CharacteristicPolynomial) -> f64 {
    RESIDUAL_TOLERANCE * p.max_coeff_modulus().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterNode {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Distinct eigenvalues with multiplicities; the multiplicities add up to
/// the polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSpectrum {
    pub nodes: Vec<ClusterNode>,
}

impl ClusteredSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.nodes.iter().map(|n| n.multiplicity).sum()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.nodes.iter().map(|n| n.multiplicity).max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.nodes.iter().all(|n| n.multiplicity == 1)
    }

    /// The multiset back as a list, equal values adjacent.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.nodes
            .iter()
            .flat_map(|n| std::iter::repeat_n(n.value, n.multiplicity))
            .collect()
    }

    pub fn min_gap(&self) -> Option<f64> {
        let values: Vec<Complex64> = self.nodes.iter().map(|n| n.value).collect();
        min_pairwise_distance(&values)
    }
}

fn min_pairwise_distance(values: &[Complex64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = (values[i] - values[j]).norm();
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

/// Which solver produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSolver {
    ClosedForm,
    Aberth,
}

impl RootSolver {
    pub fn as_str(self) -> &'static str {
        match self {
            RootSolver::ClosedForm => "closed-form",
            RootSolver::Aberth => "aberth",
        }
    }
}

/// Closed forms up to degree four, falling back to Aberth iteration when
/// the radicals miss the residual bound.
pub fn solve(p: &CharacteristicPolynomial) -> Result<(Spectrum, RootSolver)> {
    if p.degree() <= 4 {
        if let Ok(s) = solve_closed(p) {
            return Ok((s, RootSolver::ClosedForm));
        }
    }
    solve_general(p).map(|s| (s, RootSolver::Aberth))
}

/// All roots by radicals for degree 1 to 4.
pub fn solve_closed(p: &CharacteristicPolynomial) -> Result<Spectrum> {
    let c = p.coeffs();
    let mut roots = match p.degree() {
        1 => vec![-c[0]],
        2 => quadratic(c[0], c[1]).to_vec(),
        3 => cubic(c[0], c[1], c[2]).to_vec(),
        4 => quartic(c[0], c[1], c[2], c[3]).to_vec(),
        degree => return Err(Error::DegreeTooHigh { degree }),
    };
    for z in &mut roots {
        *z = polish(p, *z);
    }
    let s = Spectrum::new(roots);
    s.check_residuals(p)?;
    Ok(s)
}

// Guarded Newton steps: a step is kept only if it lowers the residual.
fn polish(p: &CharacteristicPolynomial, mut z: Complex64) -> Complex64 {
    let mut residual = p.eval(z).norm();
    for _ in 0..2 {
        let (value, deriv) = p.eval_with_derivative(z);
        if deriv == ZERO {
            break;
        }
        let candidate = z - value / deriv;
        let r = p.eval(candidate).norm();
        // Also stops on NaN.
        if r.partial_cmp(&residual) != Some(std::cmp::Ordering::Less) {
            break;
        }
        z = candidate;
        residual = r;
    }
    z
}

/// Roots of `z^2 + b z + c`.
fn quadratic(b: Complex64, c: Complex64) -> [Complex64; 2] {
    let d = (b * b - 4.0 * c).sqrt();
    // Pick the sign that avoids cancellation in b + d.
    let s = if (b.conj() * d).re >= 0.0 {
        b + d
    } else {
        b - d
    };
    let q = -0.5 * s;
    if q == ZERO {
        [ZERO, ZERO]
    } else {
        [q, c / q]
    }
}

/// Roots of `z^3 + a z^2 + b z + c` by Cardano's formula on the depressed
/// cubic `x^3 + p x + q` with `z = x - a/3`.
fn cubic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w1 = -q / 2.0 + disc;
    let w2 = -q / 2.0 - disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let u = w.cbrt();
    if u == ZERO {
        return [-shift; 3];
    }
    let v = -p / (3.0 * u);
    let omega = c64(-0.5, 3f64.sqrt() / 2.0);
    let omega2 = omega.conj();
    [
        u + v - shift,
        omega * u + omega2 * v - shift,
        omega2 * u + omega * v - shift,
    ]
}

/// Roots of `z^4 + a z^3 + b z^2 + c z + d` by Ferrari's method.
///
/// With `z = y - a/4` the quartic becomes `y^4 + p y^2 + q y + r`. For a
/// root `m` of the resolvent `m^3 + p m^2 + (p^2/4 - r) m - q^2/8`,
/// `(y^2 + p/2 + m)^2 = (s y - q/(2s))^2` with `s = sqrt(2m)`, which splits
/// into two quadratics.
fn quartic(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 4] {
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let resolvent = cubic(p, p * p / 4.0 - r, -q * q / 8.0);
    let m = resolvent
        .into_iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap_or(ZERO);

    let ys = if m == ZERO {
        // Biquadratic: q vanishes, solve for y^2.
        let [z1, z2] = quadratic(p, r);
        let (s1, s2) = (z1.sqrt(), z2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        let s = (2.0 * m).sqrt();
        let half = p / 2.0 + m;
        let t = q / (2.0 * s);
        let [y1, y2] = quadratic(-s, half + t);
        let [y3, y4] = quadratic(s, half - t);
        [y1, y2, y3, y4]
    };
    ys.map(|y| y - shift)
}

/// All roots by Aberth-Ehrlich iteration.
///
/// Starts on the circle of radius `1 + max |p_j|`, which encloses every
/// root. A root counts as converged when its last correction is below
/// `1e-13 (1 + |z|)` or its residual is already at rounding level.
pub fn solve_general(p: &CharacteristicPolynomial) -> Result<Spectrum> {
    let n = p.degree();
    // Exact zero roots come off before iterating.
    let zeros = p.coeffs().iter().rev().take_while(|&&c| c == ZERO).count();
    if zeros > 0 {
        let mut values = vec![ZERO; zeros];
        if zeros < n {
            let reduced = CharacteristicPolynomial::new(p.coeffs()[..n - zeros].to_vec())?;
            values.extend(solve_general(&reduced)?.values);
        }
        let s = Spectrum::new(values);
        s.check_residuals(p)?;
        return Ok(s);
    }
    if n == 1 {
        return Ok(Spectrum::new(vec![-p.coeff(1)]));
    }
    let radius = 1.0 + p.max_coeff_modulus();
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + ABERTH_ANGLE_OFFSET;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let noise = ABERTH_NOISE_FACTOR * f64::EPSILON;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < ABERTH_MAX_SWEEPS {
        sweeps += 1;
        let mut all_done = true;
        for i in 0..n {
            let zi = z[i];
            let (value, deriv) = p.eval_with_derivative(zi);
            if value.norm() <= noise * p.abs_eval(zi) {
                continue;
            }
            let repulsion: Complex64 = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| ONE / (zi - zj))
                .sum();
            let denom = deriv - value * repulsion;
            if denom == ZERO || !crate::numkernel::is_finite(denom) {
                all_done = false;
                continue;
            }
            let step = value / denom;
            if !crate::numkernel::is_finite(step) {
                all_done = false;
                continue;
            }
            z[i] = zi - step;
            if step.norm() > ABERTH_STEP_TOL * (1.0 + z[i].norm()) {
                all_done = false;
            }
        }
        if all_done {
            converged = true;
            break;
        }
    }

    let s = Spectrum::new(z);
    if !converged {
        let residuals = s.residuals(p);
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        return Err(Error::NoConvergence {
            sweeps,
            best: s.values,
            residuals,
            max_residual,
        });
    }
    s.check_residuals(p)?;
    Ok(s)
}

/// Single-linkage grouping with link distance `tol * max(1, max |a_k|)`.
/// Each group becomes its arithmetic mean with multiplicity equal to its
/// size. Groups whose means fall within the link distance are merged again
/// until none remain.
pub fn cluster(s: &Spectrum, tol: f64) -> ClusteredSpectrum {
    let scale = s.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let link = tol.max(0.0) * scale;

    let mut groups: Vec<Vec<Complex64>> = s.values.iter().map(|&z| vec![z]).collect();
    let mut positions: Vec<Complex64> = s.values.clone();
    loop {
        let labels = single_linkage(&positions, link);
        let count = labels.iter().max().map_or(0, |m| m + 1);
        if count == positions.len() {
            break;
        }
        let mut merged = vec![Vec::new(); count];
        for (g, &label) in groups.iter_mut().zip(&labels) {
            merged[label].append(g);
        }
        groups = merged;
        positions = groups.iter().map(|g| mean(g)).collect();
    }

    ClusteredSpectrum {
        nodes: groups
            .into_iter()
            .zip(positions)
            .map(|(members, value)| ClusterNode {
                value,
                multiplicity: members.len(),
            })
            .collect(),
    }
}

/// Arithmetic mean, exact when all values are equal.
fn mean(values: &[Complex64]) -> Complex64 {
    let first = values[0];
    first + values.iter().map(|&z| z - first).sum::<Complex64>() / values.len() as f64
}

// Component labels in order of first appearance.
fn single_linkage(points: &[Complex64], link: f64) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() <= link {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut root_label = vec![usize::MAX; n];
    let mut next = 0;
    for (i, label) in labels.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        *label = root_label[r];
    }
    labels
}

/// Relative radius inside which computed roots are candidates for one
/// multiple root.
pub const SNAP_SEARCH_RADIUS: f64 = 5e-2;

// Allowed ratio between the implied polynomial perturbation and the
// rounding level of evaluating p at the group mean.
const SNAP_NOISE_FACTOR: f64 = 1e3;
/// Newton steps used to place a snapped multiple root.
const SNAP_REFINE_STEPS: usize = 4;

/// Replaces groups of computed roots that are explained by rounding
/// perturbation of one multiple root with their common mean.
///
/// A perturbation of size `eta` splits an `m`-fold root `c` into `m` roots
/// on a circle of radius `r` with `|a_m| r^m ~ eta`, where `a_j` are the
/// Taylor coefficients of `p` at `c`. A group of size `m`, mean `c` and
/// spread `r` is snapped when `|a_j| r^j` for every `j <= m` stays below
/// `1e3 * n * eps * sum_j |p_j| |c|^(n-j)`. Groups are grown by increasing
/// pairwise distance and a merge is kept only if the merged group passes.
pub fn snap_multiple_roots(p: &CharacteristicPolynomial, s: &Spectrum) -> Spectrum {
    let n = s.values.len();
    if n < 2 {
        return s.clone();
    }
    let scale = s.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let search = SNAP_SEARCH_RADIUS * scale;

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = (s.values[i] - s.values[j]).norm();
            if d <= search {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut group_of: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for (_, i, j) in pairs {
        let (gi, gj) = (group_of[i], group_of[j]);
        if gi == gj {
            continue;
        }
        let candidate: Vec<usize> = members[gi].iter().chain(&members[gj]).copied().collect();
        let points: Vec<Complex64> = candidate.iter().map(|&k| s.values[k]).collect();
        if looks_like_multiple_root(p, &points) {
            for &k in &members[gj] {
                group_of[k] = gi;
            }
            let moved = std::mem::take(&mut members[gj]);
            members[gi].extend(moved);
        }
    }

    let mut values = s.values.clone();
    for group in members.iter().filter(|g| g.len() > 1) {
        let points: Vec<Complex64> = group.iter().map(|&k| s.values[k]).collect();
        let centre = refine_multiple_root(p, &points);
        for &k in group {
            values[k] = centre;
        }
    }
    Spectrum::new(values)
}

/// A root of multiplicity `m` is a simple root of `p^(m-1)`, where it is well
/// conditioned. Newton on that derivative, started at the cluster mean, undoes
/// the asymmetric scatter the individual roots pick up inside the noise
/// region. The mean is kept if the iteration leaves the cluster.
fn refine_multiple_root(p: &CharacteristicPolynomial, points: &[Complex64]) -> Complex64 {
    let m = points.len();
    let centre = mean(points);
    let spread = points
        .iter()
        .map(|z| (z - centre).norm())
        .fold(0.0, f64::max);
    let mut z = centre;
    for _ in 0..SNAP_REFINE_STEPS {
        let taylor = p.taylor_at(z);
        let (lower, upper) = (taylor[m - 1], taylor[m]);
        if upper == ZERO {
            break;
        }
        let step = lower / (upper * m as f64);
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    if is_finite(z) && (z - centre).norm() <= spread {
        z
    } else {
        centre
    }
}

fn looks_like_multiple_root(p: &CharacteristicPolynomial, points: &[Complex64]) -> bool {
    let m = points.len();
    let c = mean(points);
    let spread = points.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    let taylor = p.taylor_at(c);
    let noise = SNAP_NOISE_FACTOR * p.degree() as f64 * f64::EPSILON * p.abs_eval(c);
    taylor
        .iter()
        .take(m + 1)
        .enumerate()
        .all(|(j, a)| a.norm() * spread.powi(j as i32) <= noise)
}
