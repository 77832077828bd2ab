use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::correlation::{bs_steering_factor, scatterer_steering_factor};
use super::{bs_correlation_matrix, scatterer_correlation_matrix, ChannelModelSpec};
use crate::error::Result;
use crate::linalg::{
    complex_normal, complex_normal_matrix, complex_normal_vector, hermitian_eigenvalues,
    matrix_sqrt_psd, CMatrix, CVector,
};

/// Closed-form second moment `E{h hᴴ}`: `β·I` for Rayleigh, `β·R` for double scattering.
pub fn channel_second_moment(spec: &ChannelModelSpec, antennas: usize) -> Result<CMatrix> {
    spec.validate()?;
    Ok(match spec {
        ChannelModelSpec::UncorrelatedRayleigh { beta } => {
            CMatrix::identity(antennas, antennas) * Complex64::new(*beta, 0.0)
        }
        ChannelModelSpec::DoubleScattering(p) => {
            bs_correlation_matrix(antennas, p).into_inner() * Complex64::new(p.beta, 0.0)
        }
    })
}

/// Draws one channel `h = sqrt(β/S)·R^{1/2}·G·R̃^{1/2}·g̃` (or `sqrt(β)·g` for
/// Rayleigh) with fresh Gaussian `G` and `g̃`.
///
/// Builds both square roots on every call; use [`LiteralSampler`] to draw
/// repeatedly from the same link.
pub fn sample_channel<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ChannelModelSpec,
    antennas: usize,
) -> Result<CVector> {
    Ok(LiteralSampler::new(spec, antennas)?.sample(rng))
}

/// Samples the double scattering product exactly as written, through the
/// Hermitian square roots of both correlation matrices.
#[derive(Debug, Clone)]
pub struct LiteralSampler {
    inner: Literal,
}

#[derive(Debug, Clone)]
enum Literal {
    Rayleigh {
        sqrt_beta: f64,
        antennas: usize,
    },
    DoubleScattering {
        scale: f64,
        bs_root: CMatrix,
        scatterer_root: CMatrix,
    },
}

impl LiteralSampler {
    pub fn new(spec: &ChannelModelSpec, antennas: usize) -> Result<Self> {
        spec.validate()?;
        let inner = match spec {
            ChannelModelSpec::UncorrelatedRayleigh { beta } => Literal::Rayleigh {
                sqrt_beta: beta.sqrt(),
                antennas,
            },
            ChannelModelSpec::DoubleScattering(p) => Literal::DoubleScattering {
                scale: (p.beta / p.scatterers as f64).sqrt(),
                bs_root: matrix_sqrt_psd(bs_correlation_matrix(antennas, p).as_matrix())?,
                scatterer_root: matrix_sqrt_psd(scatterer_correlation_matrix(p)?.as_matrix())?,
            },
        };
        Ok(LiteralSampler { inner })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        match &self.inner {
            Literal::Rayleigh {
                sqrt_beta,
                antennas,
            } => complex_normal_vector(rng, *antennas) * Complex64::new(*sqrt_beta, 0.0),
            Literal::DoubleScattering {
                scale,
                bs_root,
                scatterer_root,
            } => {
                let s = scatterer_root.nrows();
                let g = complex_normal_matrix(rng, bs_root.nrows(), s);
                let g_tilde = complex_normal_vector(rng, s);
                bs_root * (g * (scatterer_root * g_tilde)) * Complex64::new(*scale, 0.0)
            }
        }
    }
}

/// Per-link sampler used in the simulation loop.
///
/// Conditional on `w = R̃^{1/2} g̃`, the vector `G w` is `CN(0, ‖w‖² I)`, and
/// `R^{1/2} z` with white `z` has the law of `A u` where `R = A Aᴴ` is the
/// steering-vector factorization and `u` is white of length S. Finally
/// `‖w‖² = g̃ᴴ R̃ g̃` is a sum of independent unit exponentials weighted by the
/// eigenvalues of `R̃`. A draw therefore costs `O(M·S)` instead of
/// `O(M² + M·S)` and has exactly the same distribution as [`LiteralSampler`].
#[derive(Debug, Clone)]
pub struct LinkChannel {
    inner: Factored,
    antennas: usize,
}

#[derive(Debug, Clone)]
enum Factored {
    Rayleigh {
        sqrt_beta: f64,
    },
    DoubleScattering {
        beta_over_s: f64,
        bs_factor: CMatrix,
        scatterer_gains: Vec<f64>,
    },
}

impl LinkChannel {
    pub fn new(spec: &ChannelModelSpec, antennas: usize) -> Result<Self> {
        spec.validate()?;
        let inner = match spec {
            ChannelModelSpec::UncorrelatedRayleigh { beta } => Factored::Rayleigh {
                sqrt_beta: beta.sqrt(),
            },
            ChannelModelSpec::DoubleScattering(p) => {
                let a = scatterer_steering_factor(p)?;
                let gains = hermitian_eigenvalues(&(&a * a.adjoint()))
                    .into_iter()
                    .map(|e| e.max(0.0))
                    .collect();
                Factored::DoubleScattering {
                    beta_over_s: p.beta / p.scatterers as f64,
                    bs_factor: bs_steering_factor(antennas, p),
                    scatterer_gains: gains,
                }
            }
        };
        Ok(LinkChannel { inner, antennas })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Writes one realization into `out` (length M).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.antennas);
        match &self.inner {
            Factored::Rayleigh { sqrt_beta } => {
                for o in out.iter_mut() {
                    *o = complex_normal(rng) * *sqrt_beta;
                }
            }
            Factored::DoubleScattering {
                beta_over_s,
                bs_factor,
                scatterer_gains,
            } => {
                let energy: f64 = scatterer_gains
                    .iter()
                    .map(|g| {
                        let e: f64 = Exp1.sample(rng);
                        g * e
                    })
                    .sum();
                let scale = (beta_over_s * energy).sqrt();
                out.fill(Complex64::new(0.0, 0.0));
                let m = self.antennas;
                let factor = bs_factor.as_slice();
                for n in 0..bs_factor.ncols() {
                    let u = complex_normal(rng) * scale;
                    let col = &factor[n * m..(n + 1) * m];
                    for (o, a) in out.iter_mut().zip(col) {
                        *o += a * u;
                    }
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        let mut v = CVector::zeros(self.antennas);
        self.sample_into(rng, v.as_mut_slice());
        v
    }
}
