//! Library results against slow, independent reference computations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specmat::numkernel::c64;
use specmat::sampling::unit_square_matrix;
use specmat::{char_poly, divided_difference_table, Complex64, ScalarFunction, SquareMatrix};

/// Coefficients of `det(lambda E - A)`, highest degree first, by sampling
/// the determinant on a circle and inverting the discrete Fourier transform.
fn charpoly_by_determinants(a: &SquareMatrix) -> Vec<Complex64> {
    let n = a.n();
    let m = n + 1;
    let radius = 1.0 + specmat::frobenius_norm(a);
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let lambda = Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
            a.scale(c64(-1.0, 0.0)).add_diagonal(lambda).determinant()
        })
        .collect();
    // c_k is the coefficient of lambda^k.
    let ascending: Vec<Complex64> = (0..m)
        .map(|k| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, &s)| {
                    s * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64)
                })
                .sum();
            sum / (m as f64 * radius.powi(k as i32))
        })
        .collect();
    ascending.into_iter().rev().collect()
}

#[test]
fn faddeev_leverrier_matches_determinant_interpolation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=6 {
        for _ in 0..10 {
            let a = unit_square_matrix(&mut rng, n);
            let reference = charpoly_by_determinants(&a);
            let p = char_poly(&a);
            assert!((reference[0] - c64(1.0, 0.0)).norm() < 1e-10);
            let scale = reference.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (j, &expected) in reference.iter().enumerate().skip(1) {
                let diff = (p.coeff(j) - expected).norm();
                assert!(
                    diff <= 1e-10 * scale,
                    "n={n} j={j}: {} vs {}",
                    p.coeff(j),
                    expected
                );
            }
        }
    }
}

#[test]
fn faddeev_leverrier_on_integer_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 2..=5 {
        for _ in 0..10 {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect())
                .collect();
            let a = SquareMatrix::from_real_rows(&rows).unwrap();
            let reference = charpoly_by_determinants(&a);
            let p = char_poly(&a);
            for (j, expected) in reference.iter().enumerate().skip(1) {
                // Integer matrices have integer coefficients.
                let rounded = c64(expected.re.round(), 0.0);
                assert!((p.coeff(j) - rounded).norm() < 1e-6, "n={n} j={j}");
            }
        }
    }
}

fn recursive_divided_difference(nodes: &[f64], f: &dyn Fn(f64) -> f64) -> f64 {
    match nodes {
        [x] => f(*x),
        _ => {
            let last = nodes.len() - 1;
            (recursive_divided_difference(&nodes[1..], f)
                - recursive_divided_difference(&nodes[..last], f))
                / (nodes[last] - nodes[0])
        }
    }
}

#[test]
fn divided_differences_match_the_recursive_definition() {
    let nodes = [1.0, 2.0, 3.0];
    let complex_nodes: Vec<Complex64> = nodes.iter().map(|&x| c64(x, 0.0)).collect();
    let table = divided_difference_table(&complex_nodes, &ScalarFunction::exp()).unwrap();
    for start in 0..3 {
        for order in 0..3 - start {
            let expected = recursive_divided_difference(&nodes[start..=start + order], &f64::exp);
            let got = table.entry(start, order);
            assert!(
                (got - c64(expected, 0.0)).norm() <= 1e-13 * expected.abs(),
                "f[{start}..+{order}] = {got} vs {expected}"
            );
        }
    }
}

#[test]
fn repeated_nodes_give_scaled_derivatives() {
    let x = 0.5f64;
    let nodes = vec![c64(x, 0.0); 4];
    let table = divided_difference_table(&nodes, &ScalarFunction::sin()).unwrap();
    let derivatives = [x.sin(), x.cos(), -x.sin(), -x.cos()];
    let mut factorial = 1.0;
    for (order, &d) in derivatives.iter().enumerate() {
        if order > 0 {
            factorial *= order as f64;
        }
        assert!((table.entry(0, order) - c64(d / factorial, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn near_confluent_nodes_approach_the_derivative() {
    // f[x, x + h] -> f'(x) as h -> 0, linearly in h.
    let x = 0.4f64;
    for h in [1e-3, 1e-4, 1e-5] {
        let nodes = [c64(x, 0.0), c64(x + h, 0.0)];
        let table = divided_difference_table(&nodes, &ScalarFunction::exp()).unwrap();
        assert!((table.entry(0, 1) - c64(x.exp(), 0.0)).norm() <= h * x.exp());
    }
}

/// The n = 4 closed form: `f_l` is a signed sum over `k` of an elementary
/// symmetric function of the other three roots times `e^(alpha_k)` over
/// `prod_(j != k) (alpha_j - alpha_k)`. `last_exponent` lets the test
/// substitute the exponent used in the fourth term of `f_2` and `f_3`.
fn four_by_four_display(a: [f64; 4], last_exponent: usize) -> [f64; 4] {
    let mut f = [0.0; 4];
    for k in 0..4 {
        let others: Vec<f64> = (0..4).filter(|&j| j != k).map(|j| a[j]).collect();
        let denom: f64 = others.iter().map(|&x| x - a[k]).product();
        let e1 = others[0] + others[1] + others[2];
        let e2 = others[0] * others[1] + others[0] * others[2] + others[1] * others[2];
        let e3 = others[0] * others[1] * others[2];
        let exp_k = a[k].exp();
        let exp_late = if k == 3 {
            a[last_exponent].exp()
        } else {
            exp_k
        };
        f[0] += e3 * exp_k / denom;
        f[1] -= e2 * exp_k / denom;
        f[2] += e1 * exp_late / denom;
        f[3] -= exp_late / denom;
    }
    f
}

#[test]
fn four_by_four_closed_form_uses_the_fourth_exponent() {
    let roots = [0.3, -1.1, 2.0, 0.9];
    let complex_roots: Vec<Complex64> = roots.iter().map(|&x| c64(x, 0.0)).collect();
    let p = specmat::CharacteristicPolynomial::from_roots(&complex_roots).unwrap();
    let got = specmat::lagrange_coefficients(
        &p,
        &specmat::Spectrum::new(complex_roots),
        &ScalarFunction::exp(),
    )
    .unwrap();
    let rel = |f: [f64; 4]| {
        got.iter()
            .zip(f)
            .map(|(g, e)| (g - c64(e, 0.0)).norm() / e.abs())
            .fold(0.0, f64::max)
    };
    assert!(rel(four_by_four_display(roots, 3)) < 1e-11);
    // With e^(alpha_3) in the fourth terms the display disagrees.
    assert!(rel(four_by_four_display(roots, 2)) > 1e-2);
}
