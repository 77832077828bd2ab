use num_complex::Complex64;

use crate::channel::ChannelTensor;
use crate::detection::DetectionMatrix;
use crate::error::{Error, Result};
use crate::powers::Powers;

#[derive(Debug, Clone, Default, PartialEq)]
struct UserMoments {
    count: u64,
    /// Σ v_{l,k}ᴴ h_{l,k}^l
    signal: Complex64,
    /// Σ |v_{l,k}ᴴ h_{l,k}^l|⁴, for the standard error of the own-channel power term.
    signal_fourth: f64,
    /// Σ |v_{l,k}ᴴ h_{i,t}^l|² for every user (i, t), cell-major.
    interference: Vec<f64>,
    /// Σ ‖v_{l,k}‖²
    norm: f64,
}

/// Running sums for every expectation in the SINR of every user.
///
/// All terms of one user are updated from the same realizations, so they
/// share a single count. A cell whose detector failed on a realization skips
/// that realization for all of its users.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrAccumulator {
    users: Vec<UserMoments>,
    cells: usize,
    users_per_cell: usize,
}

/// Per-user SINR, with the Monte-Carlo bookkeeping behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSinr {
    pub sinr: f64,
    /// Set when the estimated denominator was not positive and the SINR was clamped to zero.
    pub clamped: bool,
}

impl SinrAccumulator {
    pub fn new(cells: usize, users_per_cell: usize) -> Self {
        let user = UserMoments {
            interference: vec![0.0; cells * users_per_cell],
            ..UserMoments::default()
        };
        SinrAccumulator {
            users: vec![user; cells * users_per_cell],
            cells,
            users_per_cell,
        }
    }

    pub fn count(&self, l: usize, k: usize) -> u64 {
        self.users[l * self.users_per_cell + k].count
    }

    /// Mean of `v_{l,k}ᴴ h_{l,k}^l`.
    pub fn signal_mean(&self, l: usize, k: usize) -> Complex64 {
        let u = &self.users[l * self.users_per_cell + k];
        u.signal / u.count as f64
    }

    /// Mean of `|v_{l,k}ᴴ h_{i,t}^l|²`.
    pub fn interference_mean(&self, l: usize, k: usize, i: usize, t: usize) -> f64 {
        let u = &self.users[l * self.users_per_cell + k];
        u.interference[i * self.users_per_cell + t] / u.count as f64
    }

    /// Mean of `‖v_{l,k}‖²`.
    pub fn norm_mean(&self, l: usize, k: usize) -> f64 {
        let u = &self.users[l * self.users_per_cell + k];
        u.norm / u.count as f64
    }

    /// Adds the realization `channels` with the detectors computed from the
    /// same interval's estimates. `None` marks a cell excluded from this realization.
    pub fn accumulate_realization(
        &mut self,
        channels: &ChannelTensor,
        detectors: &[Option<&DetectionMatrix>],
    ) {
        let users = self.users_per_cell;
        for (l, v) in detectors.iter().enumerate() {
            let Some(v) = v else { continue };
            let v = v.matrix();
            // Row k holds v_{l,k}ᴴ h_{i,t}^l for every (i, t).
            let products = v.ad_mul(channels.station(l));
            for k in 0..users {
                let u = &mut self.users[l * users + k];
                u.count += 1;
                let own = products[(k, l * users + k)];
                u.signal += own;
                u.signal_fourth += own.norm_sqr() * own.norm_sqr();
                for (c, acc) in u.interference.iter_mut().enumerate() {
                    *acc += products[(k, c)].norm_sqr();
                }
                u.norm += v.column(k).norm_squared();
            }
        }
    }

    /// Merges another accumulator over disjoint realizations.
    pub fn merge(&mut self, other: &SinrAccumulator) {
        for (a, b) in self.users.iter_mut().zip(&other.users) {
            a.count += b.count;
            a.signal += b.signal;
            a.signal_fourth += b.signal_fourth;
            for (x, y) in a.interference.iter_mut().zip(&b.interference) {
                *x += y;
            }
            a.norm += b.norm;
        }
    }

    /// SINR of user k in cell l:
    /// `p|E{vᴴh}|² / (Σ_{i,t} p_{i,t} E{|vᴴh_{i,t}|²} − p|E{vᴴh}|² + σ² E{‖v‖²})`.
    pub fn user_sinr(&self, l: usize, k: usize, powers: &Powers, noise_var: f64) -> Result<UserSinr> {
        let users = self.users_per_cell;
        let u = &self.users[l * users + k];
        if u.count == 0 {
            return Err(Error::Domain(format!(
                "no realizations accumulated for user {k} of cell {l}"
            )));
        }
        let n = u.count as f64;
        let p = powers.get(l, k);
        let signal_power = u.signal.norm_sqr() / (n * n);
        let own_second = u.interference[l * users + k] / n;

        // Sample moments always satisfy E|X|² ≥ |E X|²; anything else is a bookkeeping bug.
        let var4 = (u.signal_fourth / n - own_second * own_second).max(0.0);
        let std_err = (var4 / n).sqrt();
        if own_second < signal_power - 3.0 * std_err - 1e-12 * signal_power {
            return Err(Error::Numerical(format!(
                "interference term below the signal term for user {k} of cell {l}"
            )));
        }

        let mut total = 0.0;
        for i in 0..self.cells {
            for t in 0..users {
                total += powers.get(i, t) * u.interference[i * users + t] / n;
            }
        }
        let numerator = p * signal_power;
        let denominator = total - numerator + noise_var * u.norm / n;
        if denominator > 0.0 {
            Ok(UserSinr {
                sinr: numerator / denominator,
                clamped: false,
            })
        } else {
            log::warn!("non-positive SINR denominator for user {k} of cell {l}; clamping to 0");
            Ok(UserSinr {
                sinr: 0.0,
                clamped: true,
            })
        }
    }

    /// SINR of every user, cell-major.
    pub fn finalize_sinr(&self, powers: &Powers, noise_var: f64) -> Result<Vec<UserSinr>> {
        let mut out = Vec::with_capacity(self.users.len());
        for l in 0..self.cells {
            for k in 0..self.users_per_cell {
                out.push(self.user_sinr(l, k, powers, noise_var)?);
            }
        }
        Ok(out)
    }
}

/// Lower bound on the ergodic SE: `(1 − τ_p/τ_c)·log2(1 + SINR)`.
pub fn spectral_efficiency(sinr: f64, tau_p: usize, tau_c: usize) -> f64 {
    let prelog = (1.0 - tau_p as f64 / tau_c as f64).max(0.0);
    prelog * (1.0 + sinr.max(0.0)).log2()
}
