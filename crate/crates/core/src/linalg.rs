//! Spectral kernels: eigendecomposition, singular values and Hermitian
//! eigenvalues.
//!
//! The iterative parts (complex Schur, SVD, Hermitian eigensolver) are
//! delegated to `nalgebra`. Eigenvectors are recovered from the Schur form by
//! triangular back-substitution.

use std::cmp::Ordering;

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, ONE, ZERO};

const MAX_ITER: usize = 10_000;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Eigenvalues, one per dimension (with multiplicity).
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns, matched with `values`.
    pub vectors: Matrix,
    /// 2-norm condition number of `vectors`; infinite when they are
    /// numerically dependent.
    pub condition_estimate: f64,
}

impl EigenDecomposition {
    /// Largest residual `|A v_i - λ_i v_i|` over all pairs.
    pub fn max_residual(&self, a: &Matrix) -> f64 {
        let av = a * &self.vectors;
        let n = a.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            let r: f64 = (0..n)
                .map(|row| (av[(row, i)] - self.values[i] * self.vectors[(row, i)]).norm_sqr())
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst
    }
}

/// Eigenvalues and right eigenvectors of a square matrix.
pub fn eig(a: &Matrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::arg(format!("eig of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    if a.is_diagonal() {
        return Ok(EigenDecomposition {
            values: a.diagonal(),
            vectors: Matrix::identity(n),
            condition_estimate: 1.0,
        });
    }
    if a.is_hermitian() {
        let se = SymmetricEigen::try_new(a.to_nalgebra(), f64::EPSILON, MAX_ITER)
            .ok_or_else(|| Error::numerical(format!("Hermitian eigensolver did not converge (n = {n})")))?;
        let values = se.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
        let vectors = Matrix::from_nalgebra(&se.eigenvectors);
        let condition_estimate = condition_number(&vectors)?;
        return Ok(EigenDecomposition { values, vectors, condition_estimate });
    }
    let schur = Schur::try_new(a.to_nalgebra(), f64::EPSILON, MAX_ITER).ok_or_else(|| {
        Error::numerical(format!(
            "complex Schur iteration did not converge (n = {n}, max |a_ij| = {:e})",
            a.max_abs()
        ))
    })?;
    let (q, t) = schur.unpack();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let tnorm = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut tri_vecs = Matrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut v = vec![ZERO; n];
        v[i] = ONE;
        for j in (0..i).rev() {
            let s: C64 = (j + 1..=i).map(|l| t[(j, l)] * v[l]).sum();
            let mut d = t[(j, j)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            v[j] = -s / d;
        }
        for (row, z) in v.into_iter().enumerate() {
            tri_vecs[(row, i)] = z;
        }
    }
    let mut vectors = &Matrix::from_nalgebra(&q) * &tri_vecs;
    for i in 0..n {
        let norm = (0..n).map(|r| vectors[(r, i)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for r in 0..n {
                vectors[(r, i)] /= norm;
            }
        }
    }
    if vectors.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("eigenvector back-substitution overflowed"));
    }
    let condition_estimate = condition_number(&vectors)?;
    Ok(EigenDecomposition { values, vectors, condition_estimate })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::arg(format!("eigenvalues of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    if a.is_diagonal() {
        return Ok(a.diagonal());
    }
    if a.is_hermitian() {
        return Ok(hermitian_eigenvalues(a)?.into_iter().map(|x| C64::new(x, 0.0)).collect());
    }
    let schur = Schur::try_new(a.to_nalgebra(), f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::numerical("complex Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..a.rows()).map(|i| t[(i, i)]).collect())
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(a.to_nalgebra(), false, false, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::numerical(format!("SVD did not converge ({}x{})", a.rows(), a.cols())))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Eigenvalues of the Hermitian part `(A + A*)/2`, in decreasing order.
pub fn hermitian_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::arg(format!("Hermitian eigenvalues of {}x{} matrix", a.rows(), a.cols())));
    }
    let sym = hermitian_part(a);
    if sym.is_diagonal() {
        let mut d: Vec<f64> = sym.diagonal().iter().map(|z| z.re).collect();
        d.sort_by(|a, b| b.total_cmp(a));
        return Ok(d);
    }
    let se = SymmetricEigen::try_new(sym.to_nalgebra(), f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::numerical("Hermitian eigensolver did not converge"))?;
    let mut d: Vec<f64> = se.eigenvalues.iter().copied().collect();
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// `(A + A*)/2`.
pub fn hermitian_part(a: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// 2-norm condition number `σ_max / σ_min`.
pub fn condition_number(a: &Matrix) -> Result<f64> {
    let s = singular_values(a)?;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Decreasing real part, ties broken by decreasing imaginary part.
pub fn cmp_spectral(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub fn sort_spectral(values: &mut [C64]) {
    values.sort_by(cmp_spectral);
}

/// Largest distance between two multisets of complex numbers after matching
/// greedily in spectral order; `f64::INFINITY` when the sizes differ.
///
/// Sorting by real then imaginary part is not stable under perturbation of
/// near-tied real parts, so each value of `a` is paired with the nearest
/// still-unmatched value of `b`.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    sort_spectral(&mut a);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in &a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}
