//! Induced norms and matrix measures (logarithmic norms) for `p ∈ {1, 2, ∞}`,
//! evaluated on plain matrices, k additive compounds and α additive
//! compounds.

use std::fmt;
use std::str::FromStr;

use crate::alpha::AlphaIndex;
use crate::compound::combinations;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, singular_values};
use crate::matrix::{Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureNorm {
    One,
    Two,
    Inf,
}

impl MeasureNorm {
    pub const ALL: [MeasureNorm; 3] = [MeasureNorm::One, MeasureNorm::Two, MeasureNorm::Inf];
}

impl fmt::Display for MeasureNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureNorm::One => "1",
            MeasureNorm::Two => "2",
            MeasureNorm::Inf => "inf",
        })
    }
}

impl FromStr for MeasureNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(MeasureNorm::One),
            "2" => Ok(MeasureNorm::Two),
            "inf" | "infinity" | "∞" => Ok(MeasureNorm::Inf),
            other => Err(Error::arg(format!("unknown norm '{other}', expected 1, 2 or inf"))),
        }
    }
}

fn require_square(a: &Matrix, what: &str) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::arg(format!("{what} of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    Ok(a.rows())
}

/// Vector p-norm.
pub fn vector_norm(x: &[C64], p: MeasureNorm) -> f64 {
    match p {
        MeasureNorm::One => x.iter().map(|z| z.norm()).sum(),
        MeasureNorm::Two => x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        MeasureNorm::Inf => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

fn max_col_sum(a: &Matrix) -> f64 {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_row_sum(a: &Matrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Induced matrix norm.
pub fn induced_norm(a: &Matrix, p: MeasureNorm) -> Result<f64> {
    Ok(match p {
        MeasureNorm::One => max_col_sum(a),
        MeasureNorm::Two => singular_values(a)?.first().copied().unwrap_or(0.0),
        MeasureNorm::Inf => max_row_sum(a),
    })
}

/// Matrix measure `μ_p(A) = lim_{ε↓0} (‖I + εA‖_p - 1)/ε`, by closed form.
pub fn matrix_measure(a: &Matrix, p: MeasureNorm) -> Result<f64> {
    let n = require_square(a, "matrix measure")?;
    if n == 0 {
        return Err(Error::arg("matrix measure of an empty matrix"));
    }
    Ok(match p {
        MeasureNorm::One => (0..n)
            .map(|j| {
                a[(j, j)].re + (0..n).filter(|&i| i != j).map(|i| a[(i, j)].norm()).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max),
        MeasureNorm::Two => hermitian_eigenvalues(a)?[0],
        MeasureNorm::Inf => (0..n)
            .map(|i| {
                a[(i, i)].re + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max),
    })
}

/// `μ_p(A^[k])` straight from the entries of `A`, without forming the
/// compound. For `p = 2` this is the sum of the `k` largest eigenvalues of
/// the Hermitian part.
pub fn compound_measure(a: &Matrix, k: usize, p: MeasureNorm) -> Result<f64> {
    let n = require_square(a, "compound measure")?;
    if k == 0 || k > n {
        return Err(Error::arg(format!("compound order k = {k} outside 1..={n}")));
    }
    match p {
        MeasureNorm::Two => Ok(hermitian_eigenvalues(a)?[..k].iter().sum()),
        MeasureNorm::One | MeasureNorm::Inf => {
            // |a_ij| summed over the complement of each tuple: column sums
            // for p = 1, row sums for p = ∞
            let weight = |i: usize, j: usize| match p {
                MeasureNorm::One => a[(j, i)].norm(),
                _ => a[(i, j)].norm(),
            };
            let mut best = f64::NEG_INFINITY;
            for tuple in combinations(n, k) {
                let mut inside = vec![false; n];
                for &i in &tuple {
                    inside[i] = true;
                }
                let mut v = 0.0;
                for &i in &tuple {
                    v += a[(i, i)].re;
                    v += (0..n).filter(|&j| !inside[j]).map(|j| weight(i, j)).sum::<f64>();
                }
                best = best.max(v);
            }
            Ok(best)
        }
    }
}

/// `μ_p(A^[α]) = (1-s) μ_p(A^[k]) + s μ_p(A^[k+1])`.
pub fn alpha_measure(a: &Matrix, alpha: AlphaIndex, p: MeasureNorm) -> Result<f64> {
    let n = require_square(a, "α measure")?;
    alpha.check_dim(n)?;
    let lower = compound_measure(a, alpha.k(), p)?;
    if alpha.is_integer() {
        return Ok(lower);
    }
    let upper = compound_measure(a, alpha.k() + 1, p)?;
    Ok((1.0 - alpha.s()) * lower + alpha.s() * upper)
}

/// `μ_p(A^[1]), …, μ_p(A^[n])`.
pub fn measure_chain(a: &Matrix, p: MeasureNorm) -> Result<Vec<f64>> {
    let n = require_square(a, "measure chain")?;
    (1..=n).map(|k| compound_measure(a, k, p)).collect()
}

/// Measure induced by the weighted norm `|x|_{p,P} = |P x|_p`, i.e.
/// `μ_p(P A P⁻¹)`.
pub fn weighted_measure(a: &Matrix, weight: &Matrix, p: MeasureNorm) -> Result<f64> {
    let n = require_square(a, "weighted measure")?;
    if weight.shape() != (n, n) {
        return Err(Error::arg(format!(
            "weight is {}x{}, matrix is {n}x{n}",
            weight.rows(),
            weight.cols()
        )));
    }
    let inv = weight.inverse()?;
    matrix_measure(&(&(weight * a) * &inv), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compound::add_compound;

    fn sample() -> Matrix {
        Matrix::from_rows(&[
            [-1.0, 0.4, -0.3, 0.2],
            [0.7, -2.0, 0.1, -0.5],
            [0.0, 0.9, 0.5, 0.3],
            [-0.2, 0.6, -0.8, -1.5],
        ])
    }

    #[test]
    fn parse_and_display() {
        for p in MeasureNorm::ALL {
            assert_eq!(p.to_string().parse::<MeasureNorm>().unwrap(), p);
        }
        assert!("3".parse::<MeasureNorm>().is_err());
    }

    #[test]
    fn identity_norms_and_measures() {
        let id = Matrix::identity(4);
        for p in MeasureNorm::ALL {
            assert!((induced_norm(&id, p).unwrap() - 1.0).abs() < 1e-15);
            assert!((matrix_measure(&id, p).unwrap() - 1.0).abs() < 1e-15);
            let c = -2.5;
            assert!((matrix_measure(&id.scale(c), p).unwrap() - c).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_norm_is_max_modulus() {
        let d = Matrix::from_real_diag(&[0.5, -3.0, 2.0]);
        for p in MeasureNorm::ALL {
            assert!((induced_norm(&d, p).unwrap() - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_two_measure_is_top_eigenvalue() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        assert!((matrix_measure(&a, MeasureNorm::Two).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn limit_definition() {
        let a = sample();
        let eps = 1e-7;
        let shifted = &Matrix::identity(4) + &a.scale(eps);
        for p in MeasureNorm::ALL {
            let fd = (induced_norm(&shifted, p).unwrap() - 1.0) / eps;
            let mu = matrix_measure(&a, p).unwrap();
            assert!((fd - mu).abs() < 1e-4, "p = {p}: {fd} vs {mu}");
        }
    }

    #[test]
    fn compound_measure_matches_formed_compound() {
        let a = sample();
        for k in 1..=4 {
            let formed = add_compound(&a, k).unwrap();
            for p in MeasureNorm::ALL {
                let direct = matrix_measure(&formed, p).unwrap();
                let closed = compound_measure(&a, k, p).unwrap();
                assert!((direct - closed).abs() < 1e-10, "k = {k}, p = {p}: {direct} vs {closed}");
            }
        }
    }

    #[test]
    fn full_order_two_measure_is_trace() {
        let a = sample();
        let mu = compound_measure(&a, 4, MeasureNorm::Two).unwrap();
        assert!((mu - a.trace().re).abs() < 1e-12);
    }

    #[test]
    fn rotation_with_decay_measures() {
        let (t, s) = (1.0, 0.5);
        let a = Matrix::from_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -t]]);
        assert!(compound_measure(&a, 2, MeasureNorm::Two).unwrap().abs() < 1e-15);
        let mu = alpha_measure(&a, AlphaIndex::new(2.0 + s).unwrap(), MeasureNorm::Two).unwrap();
        assert!((mu + s * t).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_diagonal_chain_strictly_decreases() {
        let a = Matrix::from_real_diag(&[-1.0, -2.0, -0.5, -3.0]);
        for p in MeasureNorm::ALL {
            let chain = measure_chain(&a, p).unwrap();
            assert!(chain.windows(2).all(|w| w[1] < w[0]), "{chain:?}");
        }
    }

    #[test]
    fn thomas_origin_chain() {
        // J(0) for b = 0.3: -b on the diagonal, cyclic ones above it
        let b = 0.3;
        let j = Matrix::from_rows(&[[-b, 1.0, 0.0], [0.0, -b, 1.0], [1.0, 0.0, -b]]);
        let chain = measure_chain(&j, MeasureNorm::One).unwrap();
        // each column has one off-diagonal 1; pairs pick up one outside entry
        let expect = [1.0 - b, 1.0 - 2.0 * b, -3.0 * b];
        for (x, y) in chain.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15, "{chain:?}");
        }
    }

    #[test]
    fn weighted_measure_with_identity_weight() {
        let a = sample();
        for p in MeasureNorm::ALL {
            let w = weighted_measure(&a, &Matrix::identity(4), p).unwrap();
            assert!((w - matrix_measure(&a, p).unwrap()).abs() < 1e-14);
        }
        let diag_w = Matrix::from_real_diag(&[1.0, 2.0, 0.5, 4.0]);
        let got = weighted_measure(&a, &diag_w, MeasureNorm::Inf).unwrap();
        let conj = &(&diag_w * &a) * &diag_w.inverse().unwrap();
        assert!((got - matrix_measure(&conj, MeasureNorm::Inf).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn vector_norms() {
        let x = [C64::new(3.0, 0.0), C64::new(0.0, -4.0)];
        assert_eq!(vector_norm(&x, MeasureNorm::One), 7.0);
        assert_eq!(vector_norm(&x, MeasureNorm::Two), 5.0);
        assert_eq!(vector_norm(&x, MeasureNorm::Inf), 4.0);
    }

    #[test]
    fn order_out_of_range() {
        assert!(compound_measure(&sample(), 0, MeasureNorm::One).is_err());
        assert!(compound_measure(&sample(), 5, MeasureNorm::One).is_err());
    }
}
