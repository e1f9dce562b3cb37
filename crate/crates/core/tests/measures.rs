mod common;

use alpha_compound::{
    alpha_measure, compound_measure, induced_norm, kron_product, kron_sum, matrix_measure,
    measure_chain, vector_norm, weighted_measure, AlphaIndex, Matrix, MeasureNorm, C64,
};
use proptest::collection::vec;
use proptest::prelude::*;
use rand::Rng;

use common::{real_matrix, rng};

fn real(n: usize) -> impl Strategy<Value = Matrix> {
    vec(-2.0..2.0f64, n * n).prop_map(move |d| Matrix::from_real(n, n, &d).unwrap())
}

fn norm() -> impl Strategy<Value = MeasureNorm> {
    prop_oneof![Just(MeasureNorm::One), Just(MeasureNorm::Two), Just(MeasureNorm::Inf)]
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    vec((-3.0..3.0f64, -3.0..3.0f64), n).prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_sum_measure_is_additive(
        (x, y) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| (real(n), real(m))),
        p in norm(),
    ) {
        let lhs = matrix_measure(&kron_sum(&x, &y).unwrap(), p).unwrap();
        let rhs = matrix_measure(&x, p).unwrap() + matrix_measure(&y, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn subadditive_and_homogeneous(
        (a, b) in (1usize..=5).prop_flat_map(|n| (real(n), real(n))),
        c in 0.0..4.0f64,
        p in norm(),
    ) {
        let mu = |m: &Matrix| matrix_measure(m, p).unwrap();
        prop_assert!(mu(&(&a + &b)) <= mu(&a) + mu(&b) + 1e-12);
        prop_assert!((mu(&a.scale(c)) - c * mu(&a)).abs() <= 1e-12 * (1.0 + c));
    }

    #[test]
    fn shift_rule(a in (1usize..=5).prop_flat_map(real), c in -5.0..5.0f64, p in norm()) {
        let n = a.rows();
        let shifted = &a + &Matrix::identity(n).scale(c);
        let diff = matrix_measure(&shifted, p).unwrap() - matrix_measure(&a, p).unwrap();
        prop_assert!((diff - c).abs() <= 1e-12);
    }

    #[test]
    fn cross_norm_on_vectors(
        (x, y) in (1usize..=5, 1usize..=5).prop_flat_map(|(n, m)| (cvec(n), cvec(m))),
        p in norm(),
    ) {
        let xy: Vec<C64> = x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
        let lhs = vector_norm(&xy, p);
        let rhs = vector_norm(&x, p) * vector_norm(&y, p);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn kron_product_norm_is_multiplicative(
        (x, y) in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| (real(n), real(m))),
        p in norm(),
    ) {
        let lhs = induced_norm(&kron_product(&x, &y), p).unwrap();
        let rhs = induced_norm(&x, p).unwrap() * induced_norm(&y, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn alpha_measure_interpolates_between_orders(
        (a, k) in (2usize..=5).prop_flat_map(|n| (real(n), 1..n)),
        s in 0.0..1.0f64,
        p in norm(),
    ) {
        let got = alpha_measure(&a, AlphaIndex::new(k as f64 + s).unwrap(), p).unwrap();
        let lo = compound_measure(&a, k, p).unwrap();
        let hi = compound_measure(&a, k + 1, p).unwrap();
        prop_assert!((got - ((1.0 - s) * lo + s * hi)).abs() <= 1e-12 * (1.0 + lo.abs() + hi.abs()));
    }
}

#[test]
fn chain_tail_is_monotone_once_nonpositive() {
    let mut rng = rng(41);
    let mut hits = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..=6);
        let shift = rng.random_range(-1.5..0.5);
        let a = &real_matrix(&mut rng, n, n) + &Matrix::identity(n).scale(shift);
        for p in MeasureNorm::ALL {
            let chain = measure_chain(&a, p).unwrap();
            let Some(start) = chain.iter().position(|&m| m <= 0.0) else { continue };
            hits += 1;
            for w in chain[start..].windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{p}: {chain:?}");
            }
        }
    }
    assert!(hits > 100);
}

#[test]
fn hurwitz_diagonal_chain_strictly_decreases() {
    let a = Matrix::from_real_diag(&[-0.5, -1.0, -2.0, -0.1]);
    for p in MeasureNorm::ALL {
        let chain = measure_chain(&a, p).unwrap();
        assert!(chain.windows(2).all(|w| w[1] < w[0]), "{p}: {chain:?}");
    }
}

#[test]
fn identity_measure_is_one() {
    for n in 1..=4 {
        for p in MeasureNorm::ALL {
            assert!((matrix_measure(&Matrix::identity(n), p).unwrap() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn rotation_example_at_t_one() {
    // planar rotation plus decay -t on the third axis, t = 1: μ2 = -st
    let s = 0.5;
    let a = Matrix::from_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]);
    let second = compound_measure(&a, 2, MeasureNorm::Two).unwrap();
    assert!(second.abs() < 1e-15);
    let mu = alpha_measure(&a, AlphaIndex::new(2.0 + s).unwrap(), MeasureNorm::Two).unwrap();
    assert!((mu + 0.5).abs() < 1e-12, "{mu}");
}

#[test]
fn weighted_measure_conjugates() {
    let mut rng = rng(42);
    for _ in 0..30 {
        let n = rng.random_range(2..=4);
        let a = real_matrix(&mut rng, n, n);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
        let w = Matrix::from_real_diag(&d);
        // diagonal weights in the 1-norm: column j scaled by d_i / d_j
        let direct = (0..n)
            .map(|j| {
                a[(j, j)].re
                    + (0..n).filter(|&i| i != j).map(|i| d[i] / d[j] * a[(i, j)].norm()).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let got = weighted_measure(&a, &w, MeasureNorm::One).unwrap();
        assert!((got - direct).abs() < 1e-12);
        let unit = weighted_measure(&a, &Matrix::identity(n), MeasureNorm::Two).unwrap();
        assert!((unit - matrix_measure(&a, MeasureNorm::Two).unwrap()).abs() < 1e-12);
    }
    let singular = Matrix::from_real_diag(&[1.0, 0.0]);
    assert!(weighted_measure(&Matrix::identity(2), &singular, MeasureNorm::Inf).is_err());
}
