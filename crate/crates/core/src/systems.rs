//! Demo systems: Thomas' cyclically symmetric system, its closed loop with a
//! linear feedback on the first two states, Laplacian consensus dynamics and
//! plain linear systems.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::system::{Domain, FnSystem};

fn check_b(b: f64) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::arg(format!("dissipation b = {b} must be positive")));
    }
    Ok(())
}

/// Thomas' system `ẋ_i = sin x_{i+1} - b x_i` (indices cyclic), on the
/// invariant box `b |x|∞ <= 1`.
pub fn thomas_system(b: f64) -> Result<FnSystem> {
    thomas_closed_loop(b, 0.0).map(|s| s.renamed("thomas"))
}

/// Thomas' system plus the feedback `diag(c, c, 0) x`.
pub fn thomas_closed_loop(b: f64, c: f64) -> Result<FnSystem> {
    check_b(b)?;
    if !c.is_finite() {
        return Err(Error::arg(format!("feedback gain c = {c} must be finite")));
    }
    let field = move |_: f64, x: &[f64]| {
        vec![
            x[1].sin() - b * x[0] + c * x[0],
            x[2].sin() - b * x[1] + c * x[1],
            x[0].sin() - b * x[2],
        ]
    };
    let jac = move |_: f64, x: &[f64]| {
        Matrix::from_rows(&[
            [c - b, x[1].cos(), 0.0],
            [0.0, c - b, x[2].cos()],
            [x[0].cos(), 0.0, -b],
        ])
    };
    Ok(FnSystem::new("thomas-cl", 3, field, jac).with_domain(Domain::cube(3, 1.0 / b)?))
}

/// Linear system `ẋ = A x` for a real square `A`.
pub fn lti_system(a: &Matrix) -> Result<FnSystem> {
    if !a.is_square() {
        return Err(Error::arg(format!("LTI matrix is {}x{}", a.rows(), a.cols())));
    }
    if !a.is_real(0.0) {
        return Err(Error::arg("LTI matrix must be real"));
    }
    let n = a.rows();
    let rows = a.real_rows();
    let jac = a.clone();
    let field = move |_: f64, x: &[f64]| {
        rows.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    };
    Ok(FnSystem::new("lti", n, field, move |_, _| jac.clone()))
}

/// Consensus dynamics `ẋ = -L x` for a weighted graph Laplacian `L`.
pub fn laplacian_system(l: &Matrix) -> Result<FnSystem> {
    if !l.is_square() {
        return Err(Error::arg(format!("Laplacian is {}x{}", l.rows(), l.cols())));
    }
    if !l.is_real(0.0) {
        return Err(Error::arg("Laplacian must be real"));
    }
    let rows = l.real_rows();
    for (i, r) in rows.iter().enumerate() {
        let sum: f64 = r.iter().sum();
        if sum.abs() > 1e-10 {
            return Err(Error::arg(format!("Laplacian row {} sums to {sum:e}, not 0", i + 1)));
        }
        if r.iter().enumerate().any(|(j, &v)| j != i && v > 0.0) {
            return Err(Error::arg(format!("Laplacian row {} has a positive off-diagonal entry", i + 1)));
        }
    }
    lti_system(&(-l)).map(|s| s.renamed("laplacian"))
}

/// Laplacian of the weighted directed path `1 → 2 → 3` with edge weights 1
/// and 2. Vertex 1 is globally reachable, and the distinct weights keep
/// `-L` diagonalizable with spectrum `{0, -1, -2}`.
pub fn path3_laplacian() -> Matrix {
    Matrix::from_rows(&[[0.0, 0.0, 0.0], [-1.0, 1.0, 0.0], [0.0, -2.0, 2.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{alpha_add_compound, AlphaIndex};
    use crate::compound::add_compound;
    use crate::linalg::{eigenvalues, multiset_distance};
    use crate::matrix::C64;
    use crate::system::System;

    #[test]
    fn thomas_jacobian_compounds() {
        let b = 0.3;
        let sys = thomas_system(b).unwrap();
        let x = [0.4, -1.1, 2.0];
        let j = sys.jacobian(0.0, &x);
        let j2 = add_compound(&j, 2).unwrap();
        let expect = Matrix::from_rows(&[
            [-2.0 * b, x[2].cos(), 0.0],
            [0.0, -2.0 * b, x[1].cos()],
            [-x[0].cos(), 0.0, -2.0 * b],
        ]);
        assert!(j2.max_abs_diff(&expect) < 1e-15);
        assert!((add_compound(&j, 3).unwrap()[(0, 0)].re + 3.0 * b).abs() < 1e-15);
    }

    #[test]
    fn thomas_field_and_domain() {
        let sys = thomas_system(0.5).unwrap();
        assert_eq!(sys.vector_field(0.0, &[0.0; 3]), vec![0.0; 3]);
        assert!(sys.domain().unwrap().contains(&[2.0, -2.0, 2.0]));
        assert!(!sys.domain().unwrap().contains(&[2.1, 0.0, 0.0]));
        assert!(thomas_system(0.0).is_err());
        assert!(thomas_system(-1.0).is_err());
    }

    #[test]
    fn zero_gain_closed_loop_is_open_loop() {
        let open = thomas_system(0.2).unwrap();
        let closed = thomas_closed_loop(0.2, 0.0).unwrap();
        let x = [1.0, -0.3, 2.2];
        assert_eq!(open.vector_field(0.0, &x), closed.vector_field(0.0, &x));
        assert_eq!(open.jacobian(0.0, &x), closed.jacobian(0.0, &x));
    }

    #[test]
    fn feedback_alpha_compound_is_diagonal() {
        let (b, c, s) = (0.193186, -0.7, 0.4);
        let x = [0.2, 1.3, -0.8];
        let jf = thomas_system(b).unwrap().jacobian(0.0, &x);
        let jcl = thomas_closed_loop(b, c).unwrap().jacobian(0.0, &x);
        let jg = &jcl - &jf;
        let got = alpha_add_compound(&jg, AlphaIndex::new(2.0 + s).unwrap()).unwrap();
        let expect = Matrix::from_real_diag(&[2.0 * c, (1.0 + s) * c, (1.0 + s) * c]);
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn laplacian_spectrum_and_validation() {
        let sys = laplacian_system(&path3_laplacian()).unwrap();
        let a = sys.jacobian(0.0, &[0.0; 3]);
        let expect = [C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(-2.0, 0.0)];
        assert!(multiset_distance(&eigenvalues(&a).unwrap(), &expect) < 1e-12);
        assert_eq!(sys.vector_field(0.0, &[1.0, 1.0, 1.0]), vec![0.0; 3]);
        let bad = Matrix::from_rows(&[[1.0, 0.0], [-1.0, 1.0]]);
        assert!(laplacian_system(&bad).is_err());
        let positive = Matrix::from_rows(&[[-1.0, 1.0], [1.0, -1.0]]);
        assert!(laplacian_system(&positive).is_err());
    }

    #[test]
    fn lti_field_is_matrix_product() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [-3.0, 0.5]]);
        let sys = lti_system(&a).unwrap();
        assert_eq!(sys.vector_field(0.0, &[1.0, -1.0]), vec![-1.0, -3.5]);
        assert!(lti_system(&Matrix::zeros(2, 3)).is_err());
    }
}
