//! Principal scalar powers, real powers of non-singular matrices and the
//! matrix exponential.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eig, singular_values, EigenDecomposition};
use crate::matrix::{Matrix, C64, ONE, ZERO};

/// Eigenvector matrices with a larger 2-norm condition number are treated as
/// defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;
/// `σ_min <= SINGULAR_RATIO * σ_max` counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-12;
/// Relative distance to the negative real axis below which an eigenvalue is
/// placed exactly on the branch cut.
pub const BRANCH_CUT_TOL: f64 = 1e-12;
/// Relative size of the diagonal shift applied to defective inputs.
pub const PERTURBATION_SCALE: f64 = 1e-9;
const PERTURBATION_SEED: u64 = 0x5eed_a1fa;
/// Imaginary parts below `REAL_TOL * (1 + |z|)` are dropped when the result is
/// known to be real.
pub const REAL_TOL: f64 = 1e-9;

/// Principal power `|z|^α exp(jαθ(z))` with `θ(z) ∈ (-π, π]`.
pub fn principal_power(z: C64, alpha: f64) -> Result<C64> {
    if !alpha.is_finite() {
        return Err(Error::arg(format!("non-finite exponent {alpha}")));
    }
    if z == ZERO {
        return if alpha > 0.0 {
            Ok(ZERO)
        } else {
            Err(Error::domain(format!("0 raised to non-positive power {alpha}")))
        };
    }
    if alpha == 0.0 {
        return Ok(ONE);
    }
    if alpha == 1.0 {
        return Ok(z);
    }
    Ok(C64::from_polar(z.norm().powf(alpha), alpha * principal_arg(z)))
}

/// Argument in `(-π, π]`; `atan2` returns `-π` for a negative real with a
/// negative-zero imaginary part.
pub fn principal_arg(z: C64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// Whether `z` lies on `ℝ_{<=0}` up to [`BRANCH_CUT_TOL`].
pub fn on_branch_cut(z: C64) -> bool {
    z.re <= 0.0 && z.im.abs() <= BRANCH_CUT_TOL * z.norm().max(f64::MIN_POSITIVE)
}

fn snap_to_cut(z: C64) -> C64 {
    if on_branch_cut(z) {
        C64::new(z.re, 0.0)
    } else {
        z
    }
}

#[derive(Clone, Debug)]
pub struct RealPower {
    pub matrix: Matrix,
    /// The input was numerically defective and a tiny diagonal perturbation
    /// was applied before diagonalizing.
    pub perturbed: bool,
    /// Condition number of the eigenvector matrix actually used.
    pub condition_estimate: f64,
    /// Some eigenvalue sat on `ℝ_{<=0}`, so a real input need not give a
    /// real result.
    pub spectrum_on_cut: bool,
}

impl RealPower {
    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

pub(crate) fn check_nonsingular(a: &Matrix) -> Result<()> {
    let s = singular_values(a)?;
    let (hi, lo) = (s[0], s[s.len() - 1]);
    if hi == 0.0 || lo <= SINGULAR_RATIO * hi {
        return Err(Error::domain(format!(
            "matrix is singular (σ_min = {lo:e}, σ_max = {hi:e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition with the near-defective fallback: when the eigenvector
/// matrix is too ill-conditioned, a seeded random diagonal shift of relative
/// size [`PERTURBATION_SCALE`] is applied and the decomposition recomputed.
pub(crate) fn diagonalize(a: &Matrix) -> Result<(EigenDecomposition, bool)> {
    let e = eig(a)?;
    if e.condition_estimate <= DEFECTIVE_CONDITION {
        return Ok((e, false));
    }
    let n = a.rows();
    let scale = PERTURBATION_SCALE * singular_values(a)?[0].max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURBATION_SEED);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] += C64::new(scale * rng.random_range(-1.0..1.0), 0.0);
    }
    Ok((eig(&shifted)?, true))
}

/// Real power `A^α = V diag(ℓ_i^α) V⁻¹` of a non-singular matrix.
pub fn matrix_real_power(a: &Matrix, alpha: f64) -> Result<RealPower> {
    if !a.is_square() {
        return Err(Error::arg(format!("power of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    if !alpha.is_finite() {
        return Err(Error::arg(format!("non-finite exponent {alpha}")));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(RealPower {
            matrix: a.clone(),
            perturbed: false,
            condition_estimate: 1.0,
            spectrum_on_cut: false,
        });
    }
    check_nonsingular(a)?;
    if alpha == 0.0 || alpha == 1.0 {
        return Ok(RealPower {
            matrix: if alpha == 0.0 { Matrix::identity(n) } else { a.clone() },
            perturbed: false,
            condition_estimate: 1.0,
            spectrum_on_cut: false,
        });
    }

    let (e, perturbed) = diagonalize(a)?;
    let values: Vec<C64> = e.values.iter().map(|&l| snap_to_cut(l)).collect();
    let spectrum_on_cut = values.iter().any(|&l| on_branch_cut(l));
    let powers = values
        .iter()
        .map(|&l| principal_power(l, alpha))
        .collect::<Result<Vec<_>>>()?;

    let v = &e.vectors;
    let scaled = Matrix::from_fn(n, n, |i, j| v[(i, j)] * powers[j]);
    let v_inv = v
        .inverse()
        .map_err(|_| Error::numerical("eigenvector matrix is singular"))?;
    let mut out = &scaled * &v_inv;
    if a.is_real(0.0) && !spectrum_on_cut {
        out = out.truncate_imag(REAL_TOL);
    }
    Ok(RealPower { matrix: out, perturbed, condition_estimate: e.condition_estimate, spectrum_on_cut })
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Largest 1-norm for which the degree-m approximant reaches unit roundoff.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &Matrix) -> f64 {
    (0..a.cols()).map(|j| (0..a.rows()).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn pade_low(a: &Matrix, coeffs: &[f64]) -> (Matrix, Matrix) {
    let n = a.rows();
    let a2 = a * a;
    let mut even = Matrix::identity(n).scale(coeffs[0]);
    let mut odd = Matrix::identity(n).scale(coeffs[1]);
    let mut power = Matrix::identity(n);
    for j in (2..coeffs.len()).step_by(2) {
        power = &power * &a2;
        even += &power.scale(coeffs[j]);
        if j + 1 < coeffs.len() {
            odd += &power.scale(coeffs[j + 1]);
        }
    }
    (a * &odd, even)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let b = PADE13;
    let n = a.rows();
    let id = Matrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]);
    let mut u = &a6 * &inner_u;
    u += &a6.scale(b[7]);
    u += &a4.scale(b[5]);
    u += &a2.scale(b[3]);
    u += &id.scale(b[1]);
    let u = a * &u;
    let inner_v = &(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]);
    let mut v = &a6 * &inner_v;
    v += &a6.scale(b[6]);
    v += &a4.scale(b[4]);
    v += &a2.scale(b[2]);
    v += &id.scale(b[0]);
    (u, v)
}

/// `exp(A t)` by scaling and squaring with a diagonal Padé approximant;
/// diagonal inputs are exponentiated entrywise.
pub fn matrix_exp(a: &Matrix, t: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::arg(format!("exp of non-square {}x{} matrix", a.rows(), a.cols())));
    }
    let at = a.scale(t);
    if at.is_diagonal() {
        let d: Vec<C64> = at.diagonal().iter().map(|z| z.exp()).collect();
        return Ok(Matrix::from_diag(&d));
    }
    let norm = norm1(&at);
    for (m, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(&at, coeffs);
            return pade_solve(&u, &v);
        }
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = at.scale(2f64.powi(-squarings));
    let (u, v) = pade13(&scaled);
    let mut r = pade_solve(&u, &v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    let denom = v - u;
    let numer = v + u;
    denom
        .lu()?
        .solve(&numer)
        .map_err(|_| Error::numerical("singular Padé denominator in matrix exponential"))
}
