//! Seeded random matrices for sweeps and tests.

use rand::Rng;

use crate::charpoly::char_poly;
use crate::numkernel::{c64, frobenius_norm, SquareMatrix};
use crate::roots::solve;

/// Entries uniform on the complex unit square `[0, 1) + i [0, 1)`.
pub fn unit_square_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SquareMatrix {
    let entries = (0..n * n)
        .map(|_| c64(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    SquareMatrix::new(n, entries).expect("uniform samples are finite")
}

/// Smallest distance between computed eigenvalues, `None` if the roots
/// could not be found.
pub fn eigenvalue_gap(a: &SquareMatrix) -> Option<f64> {
    let (s, _) = solve(&char_poly(a)).ok()?;
    Some(s.min_gap().unwrap_or(f64::INFINITY))
}

/// Draws unit-square matrices until one has eigenvalue gap at least
/// `min_gap` and Frobenius norm at most `max_norm`.
pub fn separated_unit_square_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    min_gap: f64,
    max_norm: f64,
    max_attempts: usize,
) -> Option<SquareMatrix> {
    (0..max_attempts).find_map(|_| {
        let a = unit_square_matrix(rng, n);
        let ok = frobenius_norm(&a) <= max_norm && eigenvalue_gap(&a).is_some_and(|g| g >= min_gap);
        ok.then_some(a)
    })
}
