#![allow(dead_code)]

use alpha_compound::{eigenvalues, singular_values, Matrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0))
}

pub fn complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Real `G + cI` whose eigenvalues all satisfy `|arg λ| < π/n`, so any sum
/// of at most `n` arguments stays inside the principal branch.
pub fn sector_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let g = real_matrix(rng, n, n);
    let radius = singular_values(&g).unwrap()[0];
    let half_angle = if n == 1 { std::f64::consts::FRAC_PI_2 } else { std::f64::consts::PI / n as f64 };
    let c = radius / half_angle.sin() * rng.random_range(1.1..2.0);
    &g + &Matrix::identity(n).scale(c)
}

/// k-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Largest `|Im Σ λ_i|` over all tuples of sizes `k` and `k + 1`.
pub fn max_tuple_imag(a: &Matrix, k: usize) -> f64 {
    let lambda = eigenvalues(a).unwrap();
    let n = lambda.len();
    let mut worst = 0.0f64;
    for size in [k, (k + 1).min(n)] {
        for q in subsets(n, size) {
            let im: f64 = q.iter().map(|&i| lambda[i].im).sum();
            worst = worst.max(im.abs());
        }
    }
    worst
}

/// Induced ∞-norm.
pub fn inf_norm(a: &Matrix) -> f64 {
    (0..a.rows()).map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}
