//! MR, ZF and MMSE linear detectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, hermitian_eigenvalues, CMatrix};

/// Largest Gram-matrix condition number ZF accepts.
pub const ZF_MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Mr,
    Zf,
    Mmse,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::Mr, DetectorKind::Zf, DetectorKind::Mmse];

    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Mr => "mr",
            DetectorKind::Zf => "zf",
            DetectorKind::Mmse => "mmse",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mr" => Ok(DetectorKind::Mr),
            "zf" => Ok(DetectorKind::Zf),
            "mmse" => Ok(DetectorKind::Mmse),
            other => Err(Error::config("detectors", format!("unknown detector `{other}`"))),
        }
    }
}

/// Detection vectors of one cell, `v_{l,k}` in column k.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMatrix(pub CMatrix);

impl DetectionMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn column(&self, k: usize) -> nalgebra::DVectorView<'_, Complex64> {
        self.0.column(k)
    }
}

/// Solves `V = Ĥ·A⁻¹` for Hermitian positive-definite `A`.
fn right_solve(h_hat: &CMatrix, a: CMatrix) -> Result<CMatrix> {
    let chol = cholesky(a)?;
    Ok(chol.solve(&h_hat.adjoint()).adjoint())
}

/// Detection matrix of one kind; see [`detector_matrices`] to share the Gram matrix.
pub fn detector_matrix(h_hat: &CMatrix, powers: &[f64], kind: DetectorKind) -> Result<DetectionMatrix> {
    detector_matrices(h_hat, powers, &[kind]).pop().unwrap()
}

/// Detection matrices for several kinds from the same estimates.
///
/// MR is `Ĥ`, ZF is `Ĥ(ĤᴴĤ)⁻¹` and MMSE is `Ĥ(ĤᴴĤ + P⁻¹)⁻¹`, with `P`
/// the diagonal of the cell's transmit powers. ZF fails when `K > M` or the
/// Gram matrix has condition number above [`ZF_MAX_CONDITION`].
pub fn detector_matrices(
    h_hat: &CMatrix,
    powers: &[f64],
    kinds: &[DetectorKind],
) -> Vec<Result<DetectionMatrix>> {
    let k = h_hat.ncols();
    let mut gram: Option<CMatrix> = None;
    kinds
        .iter()
        .map(|kind| {
            if powers.len() != k {
                return Err(Error::Domain(format!(
                    "{} powers for {k} users",
                    powers.len()
                )));
            }
            match kind {
                DetectorKind::Mr => Ok(DetectionMatrix(h_hat.clone())),
                DetectorKind::Zf => {
                    if k > h_hat.nrows() {
                        return Err(Error::Domain(format!(
                            "zero forcing needs K <= M, got K = {k}, M = {}",
                            h_hat.nrows()
                        )));
                    }
                    let g = gram.get_or_insert_with(|| h_hat.ad_mul(h_hat)).clone();
                    let eig = hermitian_eigenvalues(&g);
                    let (lo, hi) = (eig[0], eig[k - 1]);
                    if !(lo > 0.0) || hi / lo > ZF_MAX_CONDITION {
                        return Err(Error::Numerical(format!(
                            "zero-forcing Gram matrix is singular (condition {:e})",
                            hi / lo
                        )));
                    }
                    right_solve(h_hat, g).map(DetectionMatrix)
                }
                DetectorKind::Mmse => {
                    if powers.iter().any(|p| !(*p > 0.0)) {
                        return Err(Error::Domain("MMSE detection needs positive powers".into()));
                    }
                    let mut a = gram.get_or_insert_with(|| h_hat.ad_mul(h_hat)).clone();
                    for (t, p) in powers.iter().enumerate() {
                        a[(t, t)] += Complex64::new(1.0 / p, 0.0);
                    }
                    right_solve(h_hat, a).map(DetectionMatrix)
                }
            }
        })
        .collect()
}
