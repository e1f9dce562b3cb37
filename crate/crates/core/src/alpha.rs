//! Compounds of real order `α = k + s`.
//!
//! The multiplicative compound interpolates `A^(k)` and `A^(k+1)` through
//! real matrix powers and a Kronecker product; the additive compound
//! interpolates `A^[k]` and `A^[k+1]` through a Kronecker sum. Integer orders
//! fall back to the standard k-compounds.

use std::fmt;

use crate::compound::{add_compound, combinations, mult_compound};
use crate::error::{Error, Result};
use crate::functions::{check_nonsingular, matrix_real_power, on_branch_cut, principal_power};
use crate::kron::{kron_product, kron_sum};
use crate::linalg::{eigenvalues, sort_spectral};
use crate::matrix::{Matrix, C64, ONE, ZERO};

/// Real order `α >= 1` split as `α = k + s` with integer `k >= 1` and
/// `s ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaIndex {
    alpha: f64,
    k: usize,
    s: f64,
}

impl AlphaIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::arg(format!("order α = {alpha} must be a finite real >= 1")));
        }
        let k = alpha.floor();
        Ok(Self { alpha, k: k as usize, s: alpha - k })
    }

    /// Integer order `k`.
    pub fn integer(k: usize) -> Result<Self> {
        Self::new(k as f64)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_integer(&self) -> bool {
        self.s == 0.0
    }

    /// Rejects orders above the matrix dimension.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.alpha > n as f64 {
            return Err(Error::arg(format!("order α = {} exceeds dimension {n}", self.alpha)));
        }
        Ok(())
    }
}

impl fmt::Display for AlphaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alpha)
    }
}

impl TryFrom<f64> for AlphaIndex {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompoundKind {
    Multiplicative,
    Additive,
}

fn square_dim(a: &Matrix, what: &str) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::arg(format!("{what} of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    Ok(a.rows())
}

#[derive(Clone, Debug)]
pub struct AlphaMultCompound {
    pub matrix: Matrix,
    /// One of the real powers needed the defective-input perturbation.
    pub perturbed: bool,
    /// The result has no imaginary parts. A real input whose compounds have
    /// eigenvalues on `ℝ_{<=0}` can produce a complex result.
    pub real: bool,
}

/// `A^(α) = (A^(k))^{1-s} ⊗ (A^(k+1))^s`, reported with diagnostic flags.
pub fn alpha_mult_compound_detailed(a: &Matrix, alpha: AlphaIndex) -> Result<AlphaMultCompound> {
    let n = square_dim(a, "multiplicative compound")?;
    alpha.check_dim(n)?;
    if alpha.is_integer() {
        let matrix = mult_compound(a, alpha.k())?;
        let real = matrix.max_imag() == 0.0;
        return Ok(AlphaMultCompound { matrix, perturbed: false, real });
    }
    check_nonsingular(a)?;
    let lower = matrix_real_power(&mult_compound(a, alpha.k())?, 1.0 - alpha.s())?;
    let upper = matrix_real_power(&mult_compound(a, alpha.k() + 1)?, alpha.s())?;
    let matrix = kron_product(&lower.matrix, &upper.matrix);
    let real = matrix.max_imag() == 0.0;
    Ok(AlphaMultCompound { matrix, perturbed: lower.perturbed || upper.perturbed, real })
}

pub fn alpha_mult_compound(a: &Matrix, alpha: AlphaIndex) -> Result<Matrix> {
    alpha_mult_compound_detailed(a, alpha).map(|c| c.matrix)
}

/// The alternative form `(A^{1-s})^(k) ⊗ (A^s)^(k+1)`, which agrees with
/// [`alpha_mult_compound`] whenever the principal branches are compatible.
pub fn alpha_mult_compound_alt(a: &Matrix, alpha: AlphaIndex) -> Result<Matrix> {
    let n = square_dim(a, "multiplicative compound")?;
    alpha.check_dim(n)?;
    if alpha.is_integer() {
        return mult_compound(a, alpha.k());
    }
    let lower = matrix_real_power(a, 1.0 - alpha.s())?.matrix;
    let upper = matrix_real_power(a, alpha.s())?.matrix;
    Ok(kron_product(&mult_compound(&lower, alpha.k())?, &mult_compound(&upper, alpha.k() + 1)?))
}

/// `A^[α] = ((1-s) A^[k]) ⊕ (s A^[k+1])`.
pub fn alpha_add_compound(a: &Matrix, alpha: AlphaIndex) -> Result<Matrix> {
    let n = square_dim(a, "additive compound")?;
    alpha.check_dim(n)?;
    if alpha.is_integer() {
        return add_compound(a, alpha.k());
    }
    let s = alpha.s();
    let lower = add_compound(a, alpha.k())?.scale(1.0 - s);
    let upper = add_compound(a, alpha.k() + 1)?.scale(s);
    kron_sum(&lower, &upper)
}

/// Central difference `[(I + εA)^(α) - (I - εA)^(α)] / 2ε`, the derivative
/// definition of the additive compound evaluated numerically.
pub fn alpha_add_compound_oracle(a: &Matrix, alpha: AlphaIndex, eps: f64) -> Result<Matrix> {
    let n = square_dim(a, "additive compound")?;
    alpha.check_dim(n)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::numerical(format!("degenerate finite-difference step {eps}")));
    }
    let id = Matrix::identity(n);
    let step = a.scale(eps);
    let plus = alpha_mult_compound_detailed(&(&id + &step), alpha)
        .map_err(|e| Error::numerical(format!("I + εA unusable at ε = {eps}: {e}")))?;
    let minus = alpha_mult_compound_detailed(&(&id - &step), alpha)
        .map_err(|e| Error::numerical(format!("I - εA unusable at ε = {eps}: {e}")))?;
    if !plus.real || !minus.real {
        return Err(Error::numerical(format!(
            "step ε = {eps} pushes the spectrum of I ± εA onto the branch cut"
        )));
    }
    Ok((&plus.matrix - &minus.matrix).scale(0.5 / eps))
}

fn prod(values: &[C64], idx: &[usize]) -> C64 {
    idx.iter().fold(ONE, |acc, &i| acc * values[i])
}

fn sum(values: &[C64], idx: &[usize]) -> C64 {
    idx.iter().fold(ZERO, |acc, &i| acc + values[i])
}

fn snapped_power(z: C64, p: f64) -> Result<C64> {
    let z = if on_branch_cut(z) { C64::new(z.re, 0.0) } else { z };
    principal_power(z, p)
}

/// Spectrum of `A^(α)` or `A^[α]` from the eigenvalues of `A`, without
/// forming the compound. Ordered like the compound's Kronecker structure:
/// `k`-tuples outer, `(k+1)`-tuples inner.
pub fn alpha_eigs(a: &Matrix, alpha: AlphaIndex, kind: CompoundKind) -> Result<Vec<C64>> {
    let n = square_dim(a, "compound spectrum")?;
    alpha.check_dim(n)?;
    if kind == CompoundKind::Multiplicative && !alpha.is_integer() {
        check_nonsingular(a)?;
    }
    let lambda = eigenvalues(a)?;
    let (k, s) = (alpha.k(), alpha.s());
    let lower = combinations(n, k);
    if alpha.is_integer() {
        return Ok(match kind {
            CompoundKind::Multiplicative => lower.iter().map(|q| prod(&lambda, q)).collect(),
            CompoundKind::Additive => lower.iter().map(|q| sum(&lambda, q)).collect(),
        });
    }
    let upper = combinations(n, k + 1);
    let mut out = Vec::with_capacity(lower.len() * upper.len());
    for ql in &lower {
        for qj in &upper {
            out.push(match kind {
                CompoundKind::Multiplicative => {
                    snapped_power(prod(&lambda, ql), 1.0 - s)? * snapped_power(prod(&lambda, qj), s)?
                }
                CompoundKind::Additive => sum(&lambda, ql) * (1.0 - s) + sum(&lambda, qj) * s,
            });
        }
    }
    Ok(out)
}

/// Real part of the rightmost eigenvalue of `A^[α]`:
/// `Σ_{i<=k} Re λ_i + s Re λ_{k+1}` with eigenvalues in decreasing real part.
pub fn alpha_spectral_abscissa(a: &Matrix, alpha: AlphaIndex) -> Result<f64> {
    let n = square_dim(a, "spectral abscissa")?;
    alpha.check_dim(n)?;
    let mut lambda = eigenvalues(a)?;
    sort_spectral(&mut lambda);
    let head: f64 = lambda[..alpha.k()].iter().map(|z| z.re).sum();
    Ok(if alpha.is_integer() { head } else { head + alpha.s() * lambda[alpha.k()].re })
}

/// `(T A T⁻¹)^[α]` evaluated as the conjugation of `A^[α]` by
/// `T^(k) ⊗ T^(k+1)` (by `T^(k)` for integer orders).
pub fn transform_add_compound(t: &Matrix, a: &Matrix, alpha: AlphaIndex) -> Result<Matrix> {
    let n = square_dim(a, "additive compound")?;
    if t.shape() != (n, n) {
        return Err(Error::arg(format!(
            "transform is {}x{}, matrix is {n}x{n}",
            t.rows(),
            t.cols()
        )));
    }
    alpha.check_dim(n)?;
    check_nonsingular(t).map_err(|_| Error::domain("coordinate transform is singular"))?;
    let w = if alpha.is_integer() {
        mult_compound(t, alpha.k())?
    } else {
        kron_product(&mult_compound(t, alpha.k())?, &mult_compound(t, alpha.k() + 1)?)
    };
    let inner = &w * &alpha_add_compound(a, alpha)?;
    let w_inv = w.inverse()?;
    Ok(&inner * &w_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::multiset_distance;

    fn alpha(x: f64) -> AlphaIndex {
        AlphaIndex::new(x).unwrap()
    }

    #[test]
    fn alpha_index_split() {
        let a = alpha(2.5);
        assert_eq!((a.k(), a.s()), (2, 0.5));
        assert!(alpha(3.0).is_integer());
        assert!(AlphaIndex::new(0.5).is_err());
        assert!(AlphaIndex::new(f64::NAN).is_err());
        assert!(alpha(3.5).check_dim(3).is_err());
    }

    #[test]
    fn diagonal_multiplicative_interpolation() {
        let d = [2.0, 3.0, 0.5, 1.5];
        let s = 0.3;
        let dm = Matrix::from_real_diag(&d);
        let got = alpha_mult_compound(&dm, alpha(2.0 + s)).unwrap();
        // (d_i d_j)^{1-s} (d_p d_q d_r)^s for i<j, p<q<r
        let pairs = combinations(4, 2);
        let triples = combinations(4, 3);
        let mut expect = Vec::new();
        for p in &pairs {
            for t in &triples {
                let lo: f64 = p.iter().map(|&i| d[i]).product();
                let hi: f64 = t.iter().map(|&i| d[i]).product();
                expect.push(C64::new(lo.powf(1.0 - s) * hi.powf(s), 0.0));
            }
        }
        assert!(got.max_abs_diff(&Matrix::from_diag(&expect)) < 1e-13);
        // first entry d1 d2 d3^s, last d2^s d3 d4
        assert!((got[(0, 0)].re - d[0] * d[1] * d[2].powf(s)).abs() < 1e-13);
        let last = got.rows() - 1;
        assert!((got[(last, last)].re - d[1].powf(s) * d[2] * d[3]).abs() < 1e-13);
    }

    #[test]
    fn diagonal_additive_interpolation() {
        let d = [1.0, 2.0, 3.0, 4.0];
        let s = 0.25;
        let got = alpha_add_compound(&Matrix::from_real_diag(&d), alpha(2.0 + s)).unwrap();
        assert!(got.is_diagonal());
        assert_eq!(got.rows(), 24);
        assert!((got[(0, 0)].re - (d[0] + d[1] + s * d[2])).abs() < 1e-15);
        assert!((got[(1, 1)].re - (d[0] + d[1] + s * d[3])).abs() < 1e-15);
        assert!((got[(23, 23)].re - (s * d[1] + d[2] + d[3])).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_additive_compound() {
        let a = Matrix::from_rows(&[[1.0, -2.0], [0.5, 3.0]]);
        let s = 0.4;
        let got = alpha_add_compound(&a, alpha(1.0 + s)).unwrap();
        let tr = a.trace().re;
        let expect = &a.scale(1.0 - s) + &Matrix::identity(2).scale(s * tr);
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn rotation_with_decay_additive_compound() {
        let (t, s) = (1.3, 0.6);
        let a = Matrix::from_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -t]]);
        let got = alpha_add_compound(&a, alpha(2.0 + s)).unwrap();
        let expect = Matrix::from_rows(&[
            [-s * t, 0.0, 0.0],
            [0.0, -t, s - 1.0],
            [0.0, 1.0 - s, -t],
        ]);
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn integer_orders_delegate() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [0.5, -1.0, 1.0], [0.0, 3.0, 2.0]]);
        assert_eq!(alpha_add_compound(&a, alpha(2.0)).unwrap(), add_compound(&a, 2).unwrap());
        assert_eq!(alpha_mult_compound(&a, alpha(2.0)).unwrap(), mult_compound(&a, 2).unwrap());
        assert_eq!(alpha_mult_compound(&a, alpha(1.0)).unwrap(), a);
    }

    #[test]
    fn singular_matrix_rejected_for_fractional_mult() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(alpha_mult_compound(&a, alpha(1.5)), Err(Error::Domain(_))));
        assert!(alpha_mult_compound(&a, alpha(2.5)).is_err());
    }

    #[test]
    fn oracle_trivial_inputs() {
        let z = alpha_add_compound_oracle(&Matrix::zeros(3, 3), alpha(1.5), 1e-5).unwrap();
        assert!(z.max_abs() < 1e-12);
        let a = alpha(2.3);
        let got = alpha_add_compound_oracle(&Matrix::identity(3), a, 1e-5).unwrap();
        let expect = Matrix::identity(3).scale(2.3);
        assert!(got.max_abs_diff(&expect) < 1e-8);
        assert!(matches!(
            alpha_add_compound_oracle(&Matrix::identity(3), a, 0.0),
            Err(Error::Numerical(_))
        ));
        assert!(alpha_add_compound_oracle(&Matrix::identity(3), a, f64::NAN).is_err());
    }

    #[test]
    fn identity_spectra() {
        let a = alpha(2.7);
        let mult = alpha_eigs(&Matrix::identity(4), a, CompoundKind::Multiplicative).unwrap();
        assert!(mult.iter().all(|z| (z - ONE).norm() < 1e-14));
        let add = alpha_eigs(&Matrix::identity(4), a, CompoundKind::Additive).unwrap();
        assert!(add.iter().all(|z| (z.re - 2.7).abs() < 1e-14 && z.im == 0.0));
    }

    #[test]
    fn diagonal_spectrum_matches_products() {
        let d = Matrix::from_real_diag(&[2.0, 3.0, 0.5, 1.5]);
        let a = alpha(2.4);
        let formed = alpha_mult_compound(&d, a).unwrap().diagonal();
        let predicted = alpha_eigs(&d, a, CompoundKind::Multiplicative).unwrap();
        for (x, y) in formed.iter().zip(&predicted) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn additive_spectrum_matches_formed_compound() {
        let a = Matrix::from_rows(&[[0.3, -1.2, 0.5], [0.9, -0.4, 0.2], [-0.6, 0.1, -1.1]]);
        let al = alpha(1.6);
        let formed = eigenvalues(&alpha_add_compound(&a, al).unwrap()).unwrap();
        let predicted = alpha_eigs(&a, al, CompoundKind::Additive).unwrap();
        assert!(multiset_distance(&formed, &predicted) < 1e-7);
    }

    #[test]
    fn abscissa_of_ordered_reals() {
        let d = Matrix::from_real_diag(&[3.0, 2.0, 1.0]);
        assert!((alpha_spectral_abscissa(&d, alpha(1.5)).unwrap() - 4.0).abs() < 1e-15);
        assert!((alpha_spectral_abscissa(&d, alpha(3.0)).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn identity_and_scalar_transforms() {
        let a = Matrix::from_rows(&[[0.3, -1.2, 0.5], [0.9, -0.4, 0.2], [-0.6, 0.1, -1.1]]);
        let al = alpha(1.5);
        let direct = alpha_add_compound(&a, al).unwrap();
        let by_id = transform_add_compound(&Matrix::identity(3), &a, al).unwrap();
        assert!(by_id.max_abs_diff(&direct) < 1e-14);
        let by_scalar = transform_add_compound(&Matrix::identity(3).scale(2.5), &a, al).unwrap();
        assert!(by_scalar.max_abs_diff(&direct) < 1e-13);
        let singular = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(transform_add_compound(&singular, &a, al), Err(Error::Domain(_))));
    }

    #[test]
    fn product_rule_fails_in_general_but_holds_for_commuting_pairs() {
        let al = alpha(1.5);
        let a = Matrix::from_rows(&[[2.0, 1.0], [0.0, 3.0]]);
        let b = Matrix::from_rows(&[[1.0, 0.0], [1.0, 2.0]]);
        let lhs = alpha_mult_compound(&(&a * &b), al).unwrap();
        let rhs = &alpha_mult_compound(&a, al).unwrap() * &alpha_mult_compound(&b, al).unwrap();
        assert!(lhs.max_abs_diff(&rhs) > 1e-3);

        // commuting, simultaneously diagonalizable: B = A² - A + I
        let a = Matrix::from_rows(&[[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [0.0, 0.0, 4.0]]);
        let b = &(&(&a * &a) - &a) + &Matrix::identity(3);
        let al = alpha(2.5);
        let lhs = alpha_mult_compound(&(&a * &b), al).unwrap();
        let rhs = &alpha_mult_compound(&a, al).unwrap() * &alpha_mult_compound(&b, al).unwrap();
        let err = lhs.max_abs_diff(&rhs) / lhs.max_abs();
        assert!(err < 1e-10, "relative err {err:e}");
    }
}
