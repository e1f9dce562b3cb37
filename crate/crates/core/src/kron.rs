//! Kronecker product and Kronecker sum.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ZERO};

/// Block matrix `[a_ij B]` of size `(rows_a * rows_b) × (cols_a * cols_b)`.
pub fn kron_product(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = b.shape();
    Matrix::from_fn(a.rows() * p, a.cols() * q, |i, j| {
        let aij = a[(i / p, j / q)];
        if aij == ZERO {
            ZERO
        } else {
            aij * b[(i % p, j % q)]
        }
    })
}

/// `X ⊕ Y = X ⊗ I_m + I_n ⊗ Y` for square `X` (n×n) and `Y` (m×m).
pub fn kron_sum(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if !x.is_square() || !y.is_square() {
        return Err(Error::arg(format!(
            "Kronecker sum needs square operands, got {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    let n = x.rows();
    let m = y.rows();
    Ok(Matrix::from_fn(n * m, n * m, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        let mut v = ZERO;
        if k == l {
            v += x[(i, j)];
        }
        if i == j {
            v += y[(k, l)];
        }
        v
    }))
}
