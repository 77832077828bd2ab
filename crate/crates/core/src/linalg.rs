//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative tolerance for the Hermitian check and the eigenvalue clamp.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// One draw from CN(0, 1): independent real and imaginary parts, each N(0, 1/2).
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

pub fn complex_normal_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Frobenius norm of `a - b` relative to the Frobenius norm of `b`.
pub fn relative_frobenius_error(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn is_hermitian(a: &CMatrix, rel_tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    (a - a.adjoint()).norm() <= rel_tol * scale
}

/// Hermitian square root `B` of a Hermitian positive semi-definite matrix,
/// so that `B Bᴴ = B² = A`.
///
/// Eigenvalues in `[-1e-10·‖A‖, 0)` are clamped to zero; anything more
/// negative is reported as an error, as is a non-Hermitian input.
pub fn matrix_sqrt_psd(a: &CMatrix) -> Result<CMatrix> {
    if !is_hermitian(a, PSD_TOLERANCE) {
        return Err(Error::Numerical(
            "matrix square root requires a Hermitian input".into(),
        ));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let threshold = PSD_TOLERANCE * a.norm();
    // Symmetrize so rounding in the input cannot leak into the eigensolver.
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut roots = Vec::with_capacity(n);
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -threshold {
            return Err(Error::Numerical(format!(
                "matrix is not positive semi-definite (eigenvalue {lambda:e})"
            )));
        }
        roots.push(lambda.max(0.0).sqrt());
    }
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, r) in roots.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*r);
    }
    Ok(&scaled * u.adjoint())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Cholesky factorization of a Hermitian positive-definite matrix.
///
/// nalgebra takes complex square roots of the pivots, so a negative pivot
/// yields an imaginary diagonal entry instead of a failure; the diagonal of
/// the factor is checked here.
pub fn cholesky(a: CMatrix) -> Result<Cholesky<Complex64, Dyn>> {
    let not_pd = || Error::Numerical("matrix is not Hermitian positive definite".into());
    let chol = Cholesky::new(a).ok_or_else(not_pd)?;
    let l = chol.l_dirty();
    for j in 0..l.nrows() {
        let d = l[(j, j)];
        if !(d.re > 0.0 && d.im.abs() <= 1e-8 * d.re) {
            return Err(not_pd());
        }
    }
    Ok(chol)
}
