use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::DoubleScatteringParams;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Hermitian PSD correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(CMatrix);

impl CorrelationMatrix {
    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

pub fn km_to_wavelengths(km: f64, carrier_hz: f64) -> f64 {
    km * 1e3 * carrier_hz / SPEED_OF_LIGHT
}

/// Angles `n·spread/(S−1)` for `n = (1−S)/2, …, (S−1)/2`.
///
/// For even S the indices are half-integers. A single scatterer sits at 0.
pub fn scatterer_angles(s: usize, spread: f64) -> Vec<f64> {
    if s <= 1 {
        return vec![0.0; s];
    }
    let half = (s as f64 - 1.0) / 2.0;
    (0..s)
        .map(|j| (j as f64 - half) * spread / (s as f64 - 1.0))
        .collect()
}

/// Angular spread between the two scattering clusters seen as virtual arrays:
/// `2·atan(d_S·(S−1) / (2r))` with `d_S` and `r` in the same unit.
pub fn scatterer_angle_spread(scatterer_spacing: f64, s: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "cluster separation must be positive, got {r}"
        )));
    }
    if s <= 1 {
        return Ok(0.0);
    }
    Ok(2.0 * (scatterer_spacing * (s as f64 - 1.0) / (2.0 * r)).atan())
}

/// `A = S^{-1/2}·[a_1 … a_S]` with `[a_n]_m = exp(−2πj·m·d·cos(π/2 + α + φ_n))`,
/// so that the correlation matrix is `A Aᴴ`.
pub fn steering_factor(rows: usize, spacing: f64, azimuth: f64, angles: &[f64]) -> CMatrix {
    let norm = 1.0 / (angles.len() as f64).sqrt();
    DMatrix::from_fn(rows, angles.len(), |m, n| {
        let phase = -2.0 * PI * m as f64 * spacing * (FRAC_PI_2 + azimuth + angles[n]).cos();
        Complex64::from_polar(norm, phase)
    })
}

fn correlation_from_factor(a: &CMatrix) -> CorrelationMatrix {
    let mut r = a * a.adjoint();
    // The diagonal is exactly one by construction; remove rounding.
    for m in 0..r.nrows() {
        r[(m, m)] = Complex64::new(1.0, 0.0);
    }
    CorrelationMatrix(r)
}

/// Correlation between the M BS antennas and the S BS-side scatterers.
pub fn bs_correlation_matrix(antennas: usize, params: &DoubleScatteringParams) -> CorrelationMatrix {
    correlation_from_factor(&bs_steering_factor(antennas, params))
}

pub(crate) fn bs_steering_factor(antennas: usize, params: &DoubleScatteringParams) -> CMatrix {
    let angles = scatterer_angles(params.scatterers, params.angular_spread_rad);
    steering_factor(antennas, params.antenna_spacing, params.azimuth_rad, &angles)
}

/// Correlation between the transmit and receive scatterers (S × S).
pub fn scatterer_correlation_matrix(params: &DoubleScatteringParams) -> Result<CorrelationMatrix> {
    Ok(correlation_from_factor(&scatterer_steering_factor(params)?))
}

pub(crate) fn scatterer_steering_factor(params: &DoubleScatteringParams) -> Result<CMatrix> {
    let spread = scatterer_angle_spread(
        params.scatterer_spacing,
        params.scatterers,
        params.cluster_distance_wavelengths(),
    )?;
    let angles = scatterer_angles(params.scatterers, spread);
    Ok(steering_factor(
        params.scatterers,
        params.scatterer_spacing,
        params.azimuth_rad,
        &angles,
    ))
}
